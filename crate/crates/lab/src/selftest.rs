//! Fast smoke checks of the documented examples, one line each.

use anosov_core::classical::{
    ks_entropy_estimate, pressure_curve, rate_function, topological_pressure, HyperbolicToralMap,
    MeasureSampler, TrigPolynomial,
};
use anosov_core::entropy::{
    build_partition, observability_constant, uncertainty_check, uncertainty_constant,
    QuantumPartition,
};
use anosov_core::measures::{
    deviation_probability, deviation_rate_report, gof_position, planted_slope_family, verify_gof,
};
use anosov_core::quantum::{egorov_defect, weyl_quantize, CatPropagator, PlanckData, QuantumState};
use anosov_linalg::{dft, eigendecompose, idft, ComplexMatrix, SpectrumKind, C64};

use crate::config::{linspace, parse_str};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<String, String>;

fn expect(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

pub fn selftest() -> Vec<Check> {
    let cases: Vec<(&'static str, fn() -> Outcome)> = vec![
        ("dft of a delta is constant", dft_delta),
        ("dft round trip", dft_roundtrip),
        ("unitary eigendecomposition residual", eigen_residual),
        ("pressure of zero and of the unstable potential", pressure),
        ("rate function vanishes at zero", rate_zero),
        ("Op(1) is the identity", op_one),
        ("exact Egorov at N = 64", egorov),
        ("position family is a G.O.F.", gof),
        ("planted slope 1/2 recovered", planted),
        ("KS estimate on a period-2 orbit", ks_orbit),
        (
            "uncertainty with the trivial partition",
            uncertainty_trivial,
        ),
        ("observability of a ≡ 1", observability_one),
        ("minimal config parses", config_minimal),
        ("N = 1 rejected", config_small_n),
        ("duplicate key names both lines", config_duplicate),
    ];
    cases
        .into_iter()
        .map(|(name, f)| {
            let r = f();
            Check {
                name,
                passed: r.is_ok(),
                detail: r.unwrap_or_else(|x| x),
            }
        })
        .collect()
}

fn cat_prop(n: usize) -> Result<CatPropagator, String> {
    CatPropagator::new(&HyperbolicToralMap::cat(), PlanckData::new(n).map_err(e)?).map_err(e)
}

fn dft_delta() -> Outcome {
    let mut v = vec![C64::new(0.0, 0.0); 4];
    v[0] = C64::new(1.0, 0.0);
    let w = dft(&v);
    let d = w
        .iter()
        .map(|z| (z - C64::new(0.5, 0.0)).norm())
        .fold(0.0, f64::max);
    expect(d < 1e-15, format!("max deviation {d:.1e}"))
}

fn dft_roundtrip() -> Outcome {
    let v: Vec<C64> = (0..37)
        .map(|j| C64::new((j as f64).sin(), (j as f64 * 0.3).cos()))
        .collect();
    let d = idft(&dft(&v))
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    expect(d < 1e-12, format!("max deviation {d:.1e}"))
}

fn eigen_residual() -> Outcome {
    let u = cat_prop(32)?.matrix();
    let r = eigendecompose(&u, SpectrumKind::Unitary).map_err(e)?;
    expect(
        r.max_residual <= 1e-9,
        format!("residual {:.1e}", r.max_residual),
    )
}

fn pressure() -> Outcome {
    let m = HyperbolicToralMap::cat();
    let zero = topological_pressure(&m, &TrigPolynomial::zero(), 8)
        .map_err(e)?
        .value;
    let unst = topological_pressure(&m, &TrigPolynomial::constant(-m.log_lambda()), 8)
        .map_err(e)?
        .value;
    expect(
        (zero - m.log_lambda()).abs() < 1e-3 && unst.abs() < 1e-3,
        format!("P(0) = {zero:.6}, P(φᵘ) = {unst:.2e}"),
    )
}

fn rate_zero() -> Outcome {
    let m = HyperbolicToralMap::cat();
    let a = TrigPolynomial::cosine((1, 0), 2.0);
    let c = pressure_curve(&m, &a, &linspace(-3.0, 3.0, 61), 14).map_err(e)?;
    let h = rate_function(&c, &[0.0]).map_err(e)?.values[0];
    expect(h.abs() < 1e-6, format!("H(0) = {h:.2e}"))
}

fn op_one() -> Outcome {
    let op = weyl_quantize(
        &TrigPolynomial::constant(1.0),
        PlanckData::new(64).map_err(e)?,
    )
    .map_err(e)?;
    let d = op.matrix.max_abs_diff(&ComplexMatrix::identity(64));
    expect(d == 0.0, format!("max deviation {d:.1e}"))
}

fn egorov() -> Outcome {
    let m = HyperbolicToralMap::cat();
    let a = TrigPolynomial::cosine((1, 2), 1.0);
    let d = egorov_defect(&a, 1, &m, PlanckData::new(64).map_err(e)?).map_err(e)?;
    expect(d <= 1e-10, format!("defect {d:.1e}"))
}

fn gof() -> Outcome {
    let plk = PlanckData::new(16).map_err(e)?;
    let probe = weyl_quantize(&TrigPolynomial::cosine((1, 1), 1.0), plk)
        .map_err(e)?
        .matrix;
    let r = verify_gof(&gof_position(plk), &[probe], 1e-12).map_err(e)?;
    expect(r.passed(), format!("trace defect {:.1e}", r.trace_defect))
}

fn planted() -> Outcome {
    let m = HyperbolicToralMap::cat();
    let mut scan = Vec::new();
    for n in [64, 128, 256, 512] {
        let (fam, a, theta) =
            planted_slope_family(PlanckData::new(n).map_err(e)?, 0.5, 0.5).map_err(e)?;
        scan.push((
            n,
            deviation_probability(&fam, &a, &theta, 0.5, &cat_prop(n)?).map_err(e)?,
        ));
    }
    let curve = pressure_curve(
        &m,
        &TrigPolynomial::cosine((1, 0), 2.0),
        &linspace(-4.0, 4.0, 81),
        8,
    )
    .map_err(e)?;
    let rate = rate_function(&curve, &[0.5]).map_err(e)?;
    let slope = deviation_rate_report(&scan, 0.5, &rate, &m)
        .map_err(e)?
        .slope
        .ok_or("no slope")?;
    expect((slope - 0.5).abs() < 0.02, format!("slope {slope:.4}"))
}

fn ks_orbit() -> Outcome {
    let m = HyperbolicToralMap::cat();
    let orbit = MeasureSampler::periodic_orbit(&m, (0.4, 0.2), 2);
    let r = ks_entropy_estimate(&m, &orbit, 8, 10, 10_000, 3).map_err(e)?;
    expect(r.estimate <= 0.02, format!("estimate {:.2e}", r.estimate))
}

fn uncertainty_trivial() -> Outcome {
    let prop = cat_prop(64)?;
    let p = build_partition(1, 0.1, 4).map_err(e)?;
    let qp = QuantumPartition::new(&p, &prop).map_err(e)?;
    let c = uncertainty_constant(&qp, 2).map_err(e)?;
    let u = QuantumState::position(prop.plk(), 5);
    let r = uncertainty_check(&u, &qp, &c).map_err(e)?;
    expect(
        r.holds && (c.value - 1.0).abs() < 1e-12,
        format!("c = {:.3e}, gap {:.1e}", c.value, r.gap),
    )
}

fn observability_one() -> Outcome {
    let r = observability_constant(&TrigPolynomial::constant(1.0), 4, &cat_prop(32)?).map_err(e)?;
    expect(
        (r.constant - 0.25).abs() < 1e-10,
        format!("C = {:.12}", r.constant),
    )
}

fn config_minimal() -> Outcome {
    parse_str("kind = pressure\n", std::path::Path::new("."))
        .map(|c| format!("kind {}", c.kind))
        .map_err(|x| x.to_string())
}

fn config_small_n() -> Outcome {
    match parse_str(
        "kind = norm-decay\n[sweep]\nn = 1, 64\n",
        std::path::Path::new("."),
    ) {
        Ok(_) => Err("accepted".into()),
        Err(x) => expect(x.0.iter().any(|e| e.line == 3), x.0[0].to_string()),
    }
}

fn config_duplicate() -> Outcome {
    match parse_str(
        "kind = pressure\nseed = 1\nseed = 2\n",
        std::path::Path::new("."),
    ) {
        Ok(_) => Err("accepted".into()),
        Err(x) => {
            let m = &x.0[0].message;
            expect(m.contains('2') && m.contains('3'), m.clone())
        }
    }
}
