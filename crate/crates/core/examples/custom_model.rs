//! A user-defined limit state on physical inputs. A cantilever's tip
//! deflection `δ = P L³ / (3 E I)` fails when it exceeds 15 mm, with load
//! `P` and modulus `E` independent normals. The model is wrapped so the
//! sampler works in standard-normal space.
//!
//! A second run swaps in a custom marginal: logistic inputs described by
//! their own density and sampler.
//!
//! `cargo run --example custom_model`

use std::sync::Arc;

use subsim::model::{InputTransform, Marginal};
use subsim::{
    run_subset_simulation, FailureSpec, InputModel, MarginalSpec, PerformanceModel, RandomStream,
    SsConfig,
};

#[derive(Debug)]
struct Logistic;

impl Marginal for Logistic {
    fn ln_pdf(&self, x: f64) -> f64 {
        -x - 2.0 * (-x).exp().ln_1p()
    }

    fn draw(&self, stream: &mut RandomStream) -> f64 {
        let u = stream.uniform01().clamp(1e-300, 1.0 - 1e-16);
        (u / (1.0 - u)).ln()
    }
}

pub fn run_example() -> subsim::Result<(f64, f64)> {
    let (length, inertia): (f64, f64) = (3.0, 8.0e-5);
    // P in kN, E in kN/m².
    let marginals = MarginalSpec::new(vec![10.0, 2.0e8], vec![2.0, 2.0e7])?;
    let transform = InputTransform::Independent(marginals);
    let model = transform.wrap_model("cantilever tip deflection [mm]", move |x: &[f64]| {
        let (p, e) = (x[0], x[1]);
        1000.0 * p * length.powi(3) / (3.0 * e * inertia)
    })?;
    let spec = FailureSpec::new(model, 15.0);
    let est = run_subset_simulation(&spec, &SsConfig::default(), &mut RandomStream::new(0))?;
    println!(
        "P(deflection > 15 mm) ≈ {:.3e} after {} levels",
        est.p_hat, est.levels
    );

    // x1 + x2 + x3 > 15 with standard logistic inputs.
    let model = PerformanceModel::new(3, "logistic sum", |x: &[f64]| x.iter().sum())?;
    let inputs = InputModel::Independent(vec![Arc::new(Logistic); 3]);
    let spec = FailureSpec::new(model, 15.0).with_inputs(inputs)?;
    let logistic = run_subset_simulation(&spec, &SsConfig::default(), &mut RandomStream::new(0))?;
    println!("P(logistic sum > 15) ≈ {:.3e}", logistic.p_hat);
    Ok((est.p_hat, logistic.p_hat))
}

fn main() -> subsim::Result<()> {
    run_example().map(|_| ())
}
