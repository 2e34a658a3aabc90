use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use swdft::bench::{
    predict_ops, run_bench, tree_ops_per_window, write_csv, Algorithm, BenchConfig,
};
use swdft::container::{read_container, read_csv_real, write_container, Dtype};
use swdft::oracle::{
    swdft_1d_naive_budgeted, swdft_2d_naive_budgeted, swdft_kd_naive_budgeted, swfft_1d_budgeted,
    swfft_2d_budgeted, swfft_kd_budgeted,
};
use swdft::tree1d::tree_swdft_1d_with;
use swdft::tree2d::{tree_swdft_2d_with, TreeOptions};
use swdft::treekd::tree_swdft_kd_with;
use swdft::{CoefficientArray, MemoryBudget, MemoryPlan, NdArray, SwdftError, WindowSpec};

use crate::args::{AlgorithmArg, BenchArgs, OpcountArgs, TransformArgs, VerifyArgs};
use crate::Failure;

const TOLERANCE: f64 = 1e-10;

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Tree => Algorithm::Tree,
            AlgorithmArg::Fft => Algorithm::Swfft,
            AlgorithmArg::Naive => Algorithm::Naive,
        }
    }
}

fn load(path: &Path) -> Result<NdArray, Failure> {
    if !path.is_file() {
        return Err(Failure::Usage(format!(
            "input file {} not found",
            path.display()
        )));
    }
    let reader = BufReader::new(File::open(path).map_err(SwdftError::from)?);
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if is_csv {
        read_csv_real(reader)?
    } else {
        read_container(reader)?.0
    })
}

fn check_window(x: &NdArray, spec: &WindowSpec) -> Result<(), Failure> {
    match spec.check_fits(x.dims()) {
        Ok(()) => Ok(()),
        Err(e) => Err(Failure::Usage(e.to_string())),
    }
}

pub fn transform_array(
    x: &NdArray,
    spec: &WindowSpec,
    algorithm: Algorithm,
    budget: MemoryBudget,
    parallel: bool,
) -> swdft::Result<CoefficientArray> {
    match (algorithm, x.rank()) {
        (Algorithm::Tree, 1) => tree_swdft_1d_with(x, spec, budget, &mut ()),
        (Algorithm::Tree, 2) => {
            let options = TreeOptions {
                budget,
                parallel,
                ..TreeOptions::default()
            };
            tree_swdft_2d_with(x, spec, &options, &mut ())
        }
        (Algorithm::Tree, _) => tree_swdft_kd_with(x, spec, budget, &mut ()),
        (Algorithm::Swfft, 1) => swfft_1d_budgeted(x, spec, budget),
        (Algorithm::Swfft, 2) => swfft_2d_budgeted(x, spec, budget),
        (Algorithm::Swfft, _) => swfft_kd_budgeted(x, spec, budget),
        (Algorithm::Naive, 1) => swdft_1d_naive_budgeted(x, spec, budget),
        (Algorithm::Naive, 2) => swdft_2d_naive_budgeted(x, spec, budget),
        (Algorithm::Naive, _) => swdft_kd_naive_budgeted(x, spec, budget),
    }
}

pub fn transform(args: &TransformArgs) -> Result<(), Failure> {
    let x = load(&args.input)?;
    let spec = args.common.spec();
    check_window(&x, &spec)?;
    let budget = MemoryBudget(args.common.budget);
    let out = transform_array(
        &x,
        &spec,
        args.algorithm.into(),
        budget,
        args.common.threads > 1,
    )?;
    let mut w = BufWriter::new(File::create(&args.output).map_err(SwdftError::from)?);
    write_container(&mut w, out.array(), Dtype::Complex, out.normalization())?;
    w.flush().map_err(SwdftError::from)?;
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let x = match &args.input {
        Some(path) => load(path)?,
        None => swdft::bench::random_array(&args.size, args.seed),
    };
    let spec = args.common.spec();
    check_window(&x, &spec)?;
    let budget = MemoryBudget(args.common.budget);
    let parallel = args.common.threads > 1;
    let mut tree = transform_array(&x, &spec, Algorithm::Tree, budget, parallel)?;
    let fft = transform_array(&x, &spec, Algorithm::Swfft, budget, parallel)?;
    let naive = transform_array(&x, &spec, Algorithm::Naive, budget, parallel)?;
    if args.inject_fault {
        if let Some(z) = tree.array_mut().data_mut().first_mut() {
            z.re = f64::from_bits(z.re.to_bits() ^ 1);
        }
    }
    let max_err = tree
        .array()
        .max_abs_diff(naive.array())
        .ok_or_else(|| SwdftError::State("tree and direct outputs differ in shape".into()))?;
    let exact = tree
        .array()
        .data()
        .iter()
        .zip(fft.array().data())
        .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    let within = max_err <= TOLERANCE;
    println!("max_err={max_err:e}");
    println!(
        "max_err{}1e-10 exact_fft_match={exact}",
        if within { "<=" } else { ">" }
    );
    if within && exact {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

pub fn bench(args: &BenchArgs) -> Result<(), Failure> {
    if args.size.len() != 2 {
        return Err(Failure::Usage(format!(
            "bench needs a 2D size, got {} extents",
            args.size.len()
        )));
    }
    let mut windows = Vec::with_capacity(args.windows.len());
    for w in &args.windows {
        if w.rank() != 2 {
            return Err(Failure::Usage(format!("bench needs 2D windows, got {w}")));
        }
        check_window(&NdArray::zeros(&args.size), w)?;
        windows.push([w.size(0), w.size(1)]);
    }
    let config = BenchConfig {
        dims: [args.size[0], args.size[1]],
        windows,
        algorithms: args.algorithms.iter().map(|&a| a.into()).collect(),
        repetitions: args.repetitions as usize,
        seed: args.seed,
        budget: MemoryBudget(args.budget),
        max_naive_ops: args.max_naive_ops,
        parallel: args.threads > 1,
    };
    let records = run_bench(&config)?;
    for r in &records {
        if let Some(reason) = &r.skipped {
            eprintln!(
                "skipped {} {}x{}: {reason}",
                r.algorithm, r.window[0], r.window[1]
            );
        }
    }
    match &args.output {
        Some(path) => write_csv(&records, File::create(path).map_err(SwdftError::from)?)?,
        None => write_csv(&records, std::io::stdout().lock())?,
    }
    Ok(())
}

pub fn opcount(args: &OpcountArgs) -> Result<(), Failure> {
    let spec = &args.window;
    if spec.rank() != args.size.len() {
        return Err(Failure::Usage(format!(
            "window {spec} and size of rank {} differ in rank",
            args.size.len()
        )));
    }
    if let Err(e) = spec.check_fits(&args.size) {
        return Err(Failure::Usage(e.to_string()));
    }
    let algorithm = Algorithm::from(args.algorithm);
    let total = predict_ops(algorithm, &args.size, spec)?;
    let windows: u64 = spec
        .positions(&args.size)?
        .iter()
        .map(|&p| p as u64)
        .product();
    println!("algorithm={algorithm} windows={windows} total={total}");
    if algorithm == Algorithm::Tree {
        let per_window = tree_ops_per_window(spec);
        let interior = windows * per_window;
        println!(
            "per_window={per_window} interior={interior} boundary={}",
            total - interior
        );
    }
    let plan = match algorithm {
        Algorithm::Tree => MemoryPlan::tree(&args.size, spec)?,
        _ => MemoryPlan::output_only(&args.size, spec)?,
    };
    println!("{plan}");
    Ok(())
}
