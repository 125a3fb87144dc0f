use std::fs;
use std::process::Command;

use vlc_polar::{encode, BitBlock, CodeSpec, WeightHistogram};
use vlc_polar_sim::experiment::{
    ber_csv, efficiency_csv, run_length_csv, weight_csv, BER_HEADER, EFFICIENCY_HEADER,
    RUN_LENGTH_HEADER, WEIGHT_HEADER,
};
use vlc_polar_sim::{
    run_ber_sweep, run_efficiency_table, run_run_length, run_to_csv, run_weight_dist,
    ExperimentConfig, ExperimentKind, Grid, SimError,
};

fn small(kind: ExperimentKind) -> ExperimentConfig {
    ExperimentConfig {
        experiment: kind,
        n: 64,
        rates: vec![0.25, 0.5],
        dimmings: vec![0.5, 0.75],
        grid: "1:3:1".parse().unwrap(),
        trials: 50,
        workers: 3,
        interleaver: "rowcol:8x8".parse().unwrap(),
        ..ExperimentConfig::default()
    }
}

#[test]
fn csv_headers_are_stable() {
    assert_eq!(
        BER_HEADER,
        "rate,dimming,axis,axis_db,ber,fer,half_width,bits_sent"
    );
    assert_eq!(WEIGHT_HEADER, "rate,weight,count");
    assert_eq!(RUN_LENGTH_HEADER, "rate,run_length,avg_count");
    assert_eq!(EFFICIENCY_HEADER, "dimming,scheme,code_rate,efficiency");

    let ber = ber_csv(&run_ber_sweep(&small(ExperimentKind::BerSweep)).unwrap());
    assert!(ber.starts_with(&format!("{BER_HEADER}\n")));
    // 2 rates x 2 dimmings x 3 grid points
    assert_eq!(ber.lines().count(), 1 + 12);
    let first = ber.lines().nth(1).unwrap();
    assert!(first.starts_with("0.25,0.5,snr,1,"), "{first}");
    assert!(first.ends_with(",800"), "{first}");

    let w = weight_csv(&run_weight_dist(&small(ExperimentKind::WeightDist)).unwrap());
    assert!(w.starts_with(&format!("{WEIGHT_HEADER}\n")));
    let r = run_length_csv(&run_run_length(&small(ExperimentKind::RunLength)).unwrap());
    assert!(r.starts_with(&format!("{RUN_LENGTH_HEADER}\n")));
    let e = efficiency_csv(&run_efficiency_table(&small(ExperimentKind::EfficiencyTable)).unwrap());
    assert!(e.starts_with(&format!("{EFFICIENCY_HEADER}\n")));
    assert!(e.contains("\n0.75,polar,0.5,0.25\n"), "{e}");
    assert!(e.contains("\n0.75,ldpc,0.5,0.12\n"), "{e}");
}

#[test]
fn weight_csv_resums_to_sample_count() {
    let cfg = small(ExperimentKind::WeightDist);
    let csv = weight_csv(&run_weight_dist(&cfg).unwrap());
    for rate in ["0.25", "0.5"] {
        let total: u64 = csv
            .lines()
            .skip(1)
            .filter(|l| l.split(',').next() == Some(rate))
            .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, cfg.trials);
    }
}

#[test]
fn zero_message_lands_at_weight_zero() {
    let spec = CodeSpec::construct(1024, 512, 0.5).unwrap();
    let mut h = WeightHistogram::new(1024);
    h.record_codeword(&encode(&spec, &BitBlock::zeros(512)).unwrap())
        .unwrap();
    assert_eq!(h.counts()[0], 1);
    assert_eq!(h.samples(), 1);
}

#[test]
fn run_length_mass_is_conserved() {
    let cfg = small(ExperimentKind::RunLength);
    for report in run_run_length(&cfg).unwrap() {
        assert_eq!(report.codewords.total_bits(), cfg.trials * cfg.n as u64);
        assert_eq!(report.codewords.frames(), cfg.trials);
        let (d, frames) = &report.frames[1];
        assert_eq!(*d, 0.75);
        assert_eq!(frames.total_bits(), cfg.trials * 2 * cfg.n as u64);
    }
}

#[test]
fn pipeline_is_identity_at_high_snr() {
    let cfg = ExperimentConfig {
        grid: Grid::single(60.0),
        trials: 20,
        rates: vec![0.25, 0.5, 0.75],
        dimmings: vec![0.125, 0.25, 0.5, 0.75, 0.875],
        interleaver: "seeded:5".parse().unwrap(),
        ..small(ExperimentKind::BerSweep)
    };
    for row in run_ber_sweep(&cfg).unwrap() {
        assert_eq!(
            row.ledger.bit_errors, 0,
            "rate {} dimming {}",
            row.rate, row.dimming
        );
        assert_eq!(row.summary.ber, 0.0);
    }
}

#[test]
fn results_depend_on_seed_not_schedule() {
    let cfg = ExperimentConfig {
        grid: "1:2:1".parse().unwrap(),
        ..small(ExperimentKind::BerSweep)
    };
    let a = run_to_csv(&cfg).unwrap();
    assert_eq!(a, run_to_csv(&cfg).unwrap());
    let b = run_to_csv(&ExperimentConfig {
        seed: 2,
        ..cfg.clone()
    })
    .unwrap();
    assert_ne!(a, b);
}

#[test]
fn ebn0_axis_shifts_snr_by_rate() {
    let cfg = ExperimentConfig {
        axis: "ebn0".parse().unwrap(),
        grid: Grid::single(6.0),
        rates: vec![0.25],
        dimmings: vec![0.5],
        ..small(ExperimentKind::BerSweep)
    };
    let row = &run_ber_sweep(&cfg).unwrap()[0];
    assert!((row.snr_db - (6.0 - 6.020_599_913_279_624)).abs() < 1e-9);
}

#[test]
fn early_stop_caps_block_errors() {
    let cfg = ExperimentConfig {
        grid: Grid::single(-3.0),
        trials: 400,
        rates: vec![0.5],
        dimmings: vec![0.5],
        max_block_errors: Some(30),
        ..small(ExperimentKind::BerSweep)
    };
    let row = &run_ber_sweep(&cfg).unwrap()[0];
    // three shards, each stopping at ceil(30 / 3) errors
    assert_eq!(row.ledger.block_errors, 30);
    assert!(row.ledger.blocks_sent < 400);
}

#[test]
fn invalid_config_is_rejected_before_running() {
    let cfg = ExperimentConfig {
        n: 100,
        ..small(ExperimentKind::BerSweep)
    };
    match run_ber_sweep(&cfg) {
        Err(SimError::Invalid { field, .. }) => assert_eq!(field, "n"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn binary_reads_config_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eff.csv");
    let config = dir.path().join("eff.cfg");
    fs::write(
        &config,
        format!(
            "experiment = efficiency_table\nrates = 0.5\ndimmings = 0.5\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();

    let status = Command::new(env!("CARGO_BIN_EXE_vlcsim"))
        .args(["--config", config.to_str().unwrap(), "--dimmings", "0.875"])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(
        csv,
        "dimming,scheme,code_rate,efficiency\n0.875,polar,0.5,0.125\n0.875,rm,0.375,0.093\n0.875,ldpc,0.5,0.06\n"
    );

    let output = Command::new(env!("CARGO_BIN_EXE_vlcsim"))
        .args(["--config", config.to_str().unwrap(), "--n", "1000"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("`n`"));
}

#[test]
fn binary_sweep_to_stdout() {
    let output = Command::new(env!("CARGO_BIN_EXE_vlcsim"))
        .args([
            "--experiment",
            "ber_sweep",
            "--n",
            "32",
            "--rates",
            "0.5",
            "--grid-db",
            "-1:0:1",
            "--trials",
            "10",
            "--interleaver",
            "none",
            "--out",
            "-",
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 3);
    assert!(stdout.contains("\n0.5,0.5,snr,-1,"));
}
