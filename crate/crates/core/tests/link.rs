use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vlc_polar::{
    assemble_frame, codeword_region, deinterleave, disassemble_frame, encode, hard_decision,
    interleave, plan_dimming, run_length_histogram, AwgnChannel, BitBlock, ChannelParams, CodeSpec,
    InterleaverMap, InterleaverSpec, ScDecoder,
};

fn arb_bits(max: usize) -> impl Strategy<Value = BitBlock> {
    proptest::collection::vec(0u8..2, 1..max).prop_map(|b| BitBlock::new(b).unwrap())
}

proptest! {
    #[test]
    fn seeded_interleaver_round_trip(frame in arb_bits(600), seed in any::<u64>()) {
        let map = InterleaverSpec::Seeded(seed).build(frame.len()).unwrap();
        let there = interleave(&frame, &map).unwrap();
        prop_assert_eq!(there.weight(), frame.weight());
        prop_assert_eq!(deinterleave(&there, &map).unwrap(), frame);
    }

    #[test]
    fn row_column_round_trip(frame in arb_bits(600), rows in 1usize..40, cols in 1usize..40) {
        let map = InterleaverSpec::RowCol { rows, cols }.build(frame.len()).unwrap();
        prop_assert_eq!(deinterleave(&interleave(&frame, &map).unwrap(), &map).unwrap(), frame);
    }

    #[test]
    fn frame_round_trip(bits in proptest::collection::vec(0u8..2, 64), d in 0.05f64..0.95) {
        let cw = BitBlock::new(bits).unwrap();
        let plan = plan_dimming(64, d).unwrap();
        let frame = assemble_frame(&cw, &plan).unwrap();
        prop_assert_eq!(frame.len(), plan.frame_len());
        prop_assert_eq!(
            frame.weight(),
            cw.weight() + plan.compensation() * plan.cs_value() as usize
        );
        prop_assert_eq!(disassemble_frame(&frame, &plan).unwrap(), cw);
    }

    #[test]
    fn run_lengths_conserve_mass(frame in arb_bits(400)) {
        let h = run_length_histogram(&frame);
        prop_assert_eq!(h.total_bits(), frame.len() as u64);
    }

    #[test]
    fn explicit_permutations_round_trip(frame in arb_bits(200), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..frame.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let map = InterleaverMap::from_permutation(perm.clone()).unwrap();
        let out = interleave(&frame, &map).unwrap();
        for (p, &src) in perm.iter().enumerate() {
            prop_assert_eq!(out[p], frame[src]);
        }
        prop_assert_eq!(deinterleave(&out, &map).unwrap(), frame);
    }
}

#[test]
fn frame_round_trips_for_table_plans() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in [0.5, 0.75, 0.875] {
        let plan = plan_dimming(1024, d).unwrap();
        for _ in 0..1000 {
            let cw = BitBlock::from_bools((0..1024).map(|_| rng.random::<bool>()));
            let frame = assemble_frame(&cw, &plan).unwrap();
            assert_eq!(disassemble_frame(&frame, &plan).unwrap(), cw);
        }
    }
}

#[test]
fn high_snr_link_is_transparent() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let spec = CodeSpec::construct(256, 128, 0.5).unwrap();
    let mut dec = ScDecoder::new(&spec);
    for d in [0.25, 0.5, 0.75] {
        let plan = plan_dimming(256, d).unwrap();
        let map = InterleaverSpec::RowCol { rows: 16, cols: 16 }
            .build(plan.frame_len())
            .unwrap();
        let mut channel = AwgnChannel::new(ChannelParams::new(60.0, 0.5, 3).unwrap());
        for _ in 0..100 {
            let msg = BitBlock::from_bools((0..128).map(|_| rng.random::<bool>()));
            let frame = assemble_frame(&encode(&spec, &msg).unwrap(), &plan).unwrap();
            let rx = channel.transmit(&map.apply(&frame).unwrap());
            let llrs = map.invert(&channel.demodulate(&rx).unwrap()).unwrap();
            let out = dec
                .decode_slice(codeword_region(&llrs, &plan).unwrap())
                .unwrap();
            assert_eq!(out, msg);
        }
    }
}

#[test]
fn uncoded_error_rate_tracks_q_function() {
    let params = ChannelParams::new(0.0, 1.0, 23).unwrap();
    let mut channel = AwgnChannel::new(params);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let bits: Vec<u8> = (0..1_000_000).map(|_| rng.random::<bool>() as u8).collect();
    let rx = channel.transmit(&bits);
    let llrs = channel.demodulate(&rx).unwrap();
    let errors = bits
        .iter()
        .zip(llrs.iter())
        .filter(|(&b, &l)| hard_decision(l) != b)
        .count();
    let ber = errors as f64 / bits.len() as f64;
    let q = vlc_polar::uncoded_ber(0.0);
    assert!((ber - q).abs() / q < 0.05, "{ber} vs {q}");
}
