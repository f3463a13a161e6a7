//! wasm-bindgen bindings for the browser demo.
//!
//! Three interactive operations back the static page in `www/`:
//! outage-vs-SNR curves, per-link shape-factor sensitivity, and the
//! diversity-order slope fit. The `*_impl` functions hold the actual logic
//! and compile natively so they stay unit-testable without a wasm
//! toolchain; the exported shims only translate errors for JS.

use wasm_bindgen::prelude::*;

use ncc_outage::analytic::{
    outage_extended_iid, outage_generalized, outage_two_pair, ExtendedTopology, RateTarget,
    TwoPairLinks, UnionMode,
};
use ncc_outage::db_to_linear;
use ncc_outage::diversity::{estimate_diversity, predicted_diversity};
use ncc_outage::fading::LinkFading;

fn mode(exact_union: bool) -> UnionMode {
    if exact_union {
        UnionMode::ExactUnion
    } else {
        UnionMode::PaperSum
    }
}

fn grid(start_db: f64, stop_db: f64, step_db: f64) -> Result<Vec<f64>, String> {
    if !(step_db > 0.0 && stop_db >= start_db && start_db.is_finite()) {
        return Err(format!("bad SNR grid {start_db}:{step_db}:{stop_db}"));
    }
    let n = ((stop_db - start_db) / step_db + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start_db + i as f64 * step_db).collect())
}

#[allow(clippy::too_many_arguments)]
fn outage_curve_impl(
    m: f64,
    rt: f64,
    n_pairs: usize,
    m_relays: usize,
    start_db: f64,
    stop_db: f64,
    step_db: f64,
    exact_union: bool,
) -> Result<Vec<f64>, String> {
    let rate = RateTarget::new(rt).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for db in grid(start_db, stop_db, step_db)? {
        let gbar = db_to_linear(db);
        let p = if exact_union {
            let link = LinkFading::new(m, gbar).map_err(|e| e.to_string())?;
            let topo =
                ExtendedTopology::iid(n_pairs, m_relays, link).map_err(|e| e.to_string())?;
            outage_generalized(&topo, rate, mode(true)).map_err(|e| e.to_string())?
        } else {
            outage_extended_iid(n_pairs, m_relays, m, gbar, rate).map_err(|e| e.to_string())?
        };
        out.push(p);
    }
    Ok(out)
}

fn per_link_outage_impl(
    m_links: [f64; 5],
    snr_db: f64,
    rt: f64,
    exact_union: bool,
) -> Result<f64, String> {
    let gbar = db_to_linear(snr_db);
    let link = |m: f64| LinkFading::new(m, gbar).map_err(|e| e.to_string());
    let links = TwoPairLinks {
        s1r1: link(m_links[0])?,
        s2r1: link(m_links[1])?,
        r1r2: link(m_links[2])?,
        r2d1: link(m_links[3])?,
        s2d1: link(m_links[4])?,
    };
    let rate = RateTarget::new(rt).map_err(|e| e.to_string())?;
    outage_two_pair(&links, rate, mode(exact_union)).map_err(|e| e.to_string())
}

fn diversity_fit_impl(
    m: f64,
    rt: f64,
    n_pairs: usize,
    m_relays: usize,
    lo_db: f64,
    hi_db: f64,
) -> Result<Vec<f64>, String> {
    let rate = RateTarget::new(rt).map_err(|e| e.to_string())?;
    let mut curve = Vec::new();
    for db in grid(lo_db, hi_db, 1.0)? {
        let gbar = db_to_linear(db);
        let p = outage_extended_iid(n_pairs, m_relays, m, gbar, rate).map_err(|e| e.to_string())?;
        curve.push((gbar, p));
    }
    let fit = estimate_diversity(&curve, (lo_db, hi_db)).map_err(|e| e.to_string())?;
    let predicted = predicted_diversity(n_pairs, m).map_err(|e| e.to_string())?;
    Ok(vec![fit.d_hat, predicted.d, fit.residual])
}

/// Outage probability of the i.i.d. N-pair / M-relay network on a dB grid.
/// Returns one value per grid point, `start_db, start_db+step_db, ...`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn outage_curve(
    m: f64,
    rt: f64,
    n_pairs: usize,
    m_relays: usize,
    start_db: f64,
    stop_db: f64,
    step_db: f64,
    exact_union: bool,
) -> Result<Vec<f64>, JsError> {
    outage_curve_impl(m, rt, n_pairs, m_relays, start_db, stop_db, step_db, exact_union)
        .map_err(|e| JsError::new(&e))
}

/// Two-pair outage with one shape factor per link
/// (s1r1, s2r1, r1r2, r2d1, s2d1) at a single SNR point.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn per_link_outage(
    m_s1r1: f64,
    m_s2r1: f64,
    m_r1r2: f64,
    m_r2d1: f64,
    m_s2d1: f64,
    snr_db: f64,
    rt: f64,
    exact_union: bool,
) -> Result<f64, JsError> {
    per_link_outage_impl([m_s1r1, m_s2r1, m_r1r2, m_r2d1, m_s2d1], snr_db, rt, exact_union)
        .map_err(|e| JsError::new(&e))
}

/// Least-squares diversity estimate on the analytic curve over
/// `[lo_db, hi_db]`, sampled at 1 dB. Returns
/// `[d_hat, predicted N*m, rms residual]`.
#[wasm_bindgen]
pub fn diversity_fit(
    m: f64,
    rt: f64,
    n_pairs: usize,
    m_relays: usize,
    lo_db: f64,
    hi_db: f64,
) -> Result<Vec<f64>, JsError> {
    diversity_fit_impl(m, rt, n_pairs, m_relays, lo_db, hi_db).map_err(|e| JsError::new(&e))
}
