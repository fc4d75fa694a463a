//! Quick invariant suite on default parameters.

use dcg_core::analytic_models::{fano_bms_population, FanoParams};
use dcg_core::dcg_engine::compute_t;
use dcg_core::lindblad_check::{certify_psd, dampening_matrix, decompose_generator};
use dcg_core::{FermionLeads, Lead, QuadratureConfig};

use crate::config::Method;
use crate::models::{build, BuiltModel};
use crate::presets::Preset;
use crate::run::{compute_method, max_deviation};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: dcg_core::Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

pub fn run_checks(q: &QuadratureConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    let mut fig1 = Preset::Fig1.scenario();
    fig1.grid.t_max = 10.0;
    fig1.grid.n_points = 21;
    out.push(outcome(
        "dcg2 trajectory is a valid state (fig1)",
        compute_method(&fig1, Method::Dcg(2), q).map(|traj| match traj {
            crate::run::Trajectory::States(s) => {
                let min = s.iter().map(|r| r.min_eigenvalue()).fold(f64::INFINITY, f64::min);
                let tr = s.iter().map(|r| (r.matrix().trace() - 1.0).norm()).fold(0.0, f64::max);
                (min >= -1e-8 && tr < 1e-9, format!("min eigenvalue {min:.3e}, trace defect {tr:.3e}"))
            }
            crate::run::Trajectory::Populations(_) => (false, "expected states".into()),
        }),
    ));

    out.push(outcome("second-order generator has Lindblad form (fig1, tau = 2)", {
        let model = build(fig1.model, &fig1.params).expect("preset is valid");
        (|| {
            let (sys, bath) = (model.system()?, model.bath());
            let gamma = dampening_matrix(2.0, &sys, &bath, q)?;
            let report = certify_psd(&gamma)?;
            let ts = dcg_core::dcg_engine::compute_t_list(2, 2.0, &sys, &bath, q)?;
            let l = dcg_core::dcg_engine::extract_l(2, 2.0, &ts)?;
            decompose_generator(&l[1])?;
            Ok((report.is_psd, format!("min eigenvalue {:.3e}", report.min_eig)))
        })()
    }));

    let mut deph = Preset::Dephasing.scenario();
    deph.grid.t_max = 5.0;
    deph.grid.n_points = 6;
    out.push(outcome(
        "dcg2 is exact under pure dephasing",
        (|| {
            let a = compute_method(&deph, Method::Dcg(2), q)?;
            let b = compute_method(&deph, Method::Exact, q)?;
            let d = max_deviation(&a, &b);
            Ok((d < 1e-6, format!("max deviation {d:.3e}")))
        })(),
    ));

    out.push(outcome(
        "dcg4 equals dcg2 under pure dephasing (tau = 0.5)",
        (|| {
            let model = build(deph.model, &deph.params).expect("preset is valid");
            let (sys, bath) = (model.system()?, model.bath());
            let t2 = compute_t(2, 0.5, &sys, &bath, q)?;
            let t4 = compute_t(4, 0.5, &sys, &bath, q)?;
            let r = t4.sub(&t2.then_after(&t2).scale(0.5)).norm() / t2.norm().powi(2);
            Ok((r <= 1e-6, format!("relative residual {r:.3e}")))
        })(),
    ));

    out.push(outcome(
        "bms population ignores the lead widths",
        (|| {
            let fano = Preset::Fano.scenario();
            let BuiltModel::Fano(base) = build(fano.model, &fano.params)? else {
                unreachable!("fano preset builds a Fano model")
            };
            let with_right_width = |delta_r: f64| -> dcg_core::Result<FanoParams> {
                let l = &base.leads;
                let leads = FermionLeads::new(
                    l.amplitude(Lead::Left),
                    l.amplitude(Lead::Right),
                    l.width(Lead::Left),
                    delta_r,
                    l.center(Lead::Left),
                    base.eps_d,
                )?;
                FanoParams::new(base.eps_d, leads, base.lambda)
            };
            let (a, b) = (with_right_width(1.0)?, with_right_width(5.0)?);
            let same = (0..=20).all(|k| {
                let t = k as f64;
                fano_bms_population(t, &a, 1.0).ok() == fano_bms_population(t, &b, 1.0).ok()
            });
            Ok((same, if same { "identical".into() } else { "trajectories differ".into() }))
        })(),
    ));
    out
}
