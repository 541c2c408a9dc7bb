//! Arithmetic gadget builders: approximate product, ReLU, branch
//! selection, and exact integer floor/mod via indicator sums.

use std::collections::BTreeMap;

use super::{
    add_indicator, concat_layer, named, pow2_at_least, pow2_at_most, sqrt_2pi, FfnAssembler,
    GadgetBlock, GadgetKind, EXACT_BUDGET, LAMBDA,
};
use crate::kernel::{LayerSpec, ResidualMode};

/// f(a, b) ≈ ab on [−M, M]² within eps, hidden width 4.
///
/// The even part of GeLU, E(u) = GeLU(u) + GeLU(−u) = 2φ(0)u² + O(u⁴),
/// turns four units into a product through the polarization identity
/// ab = [(a+b)² − (a−b)²]/4:
///
/// f = [E(δ(a+b)) − E(δ(a−b))] / (8φ(0)δ²),  |f − ab| ≤ (2/3)δ²M⁴,
///
/// so δ² ≤ 0.75·eps/M⁴ (and δ ≤ 1/(4M) to keep the series bound valid)
/// gives |f − ab| ≤ eps with twofold headroom.
pub fn build_product_unit(m_bound: f64, eps: f64) -> GadgetBlock {
    assert!(m_bound >= 1.0, "product unit needs M >= 1");
    assert!(eps > 0.0 && eps < 1.0, "product unit needs eps in (0, 1)");
    let cap = (1.0 / (4.0 * m_bound)).min((0.75 * eps).sqrt() / (m_bound * m_bound));
    let delta = pow2_at_most(cap);
    let c = sqrt_2pi() / (8.0 * delta * delta);
    let mut f = FfnAssembler::new(2, 1);
    let sum_p = f.unit(&[(0, delta), (1, delta)], 0.0);
    let sum_n = f.unit(&[(0, -delta), (1, -delta)], 0.0);
    let dif_p = f.unit(&[(0, delta), (1, -delta)], 0.0);
    let dif_n = f.unit(&[(0, -delta), (1, delta)], 0.0);
    f.emit(sum_p, 0, c);
    f.emit(sum_n, 0, c);
    f.emit(dif_p, 0, -c);
    f.emit(dif_n, 0, -c);
    let layer = concat_layer(2, vec![], f.build());
    let block = GadgetBlock {
        kind: GadgetKind::Product,
        layers: vec![layer],
        in_channels: named(&[("a", 0), ("b", 1)]),
        out_channels: named(&[("product", 2)]),
        eps_budget: eps,
        lipschitz: 2.0 * m_bound,
        max_weight_bound: 21.0 * m_bound * m_bound + 2.0 * m_bound.powi(4) / eps,
        tag: format!("product(M={m_bound}, eps={eps}, delta={delta})"),
    };
    block.assert_well_formed();
    block
}

/// ReLU(x) ≈ GeLU(λx)/λ within eps everywhere, bit-exact for x = 0 and
/// for |x| ≥ 40/λ (so on every half-integer at the default λ = 128).
pub fn build_relu_unit(eps: f64) -> GadgetBlock {
    assert!(eps > 0.0 && eps < 1.0, "relu unit needs eps in (0, 1)");
    let lambda = pow2_at_least(LAMBDA.max(1.0 / (eps * sqrt_2pi())));
    let mut f = FfnAssembler::new(1, 1);
    let u = f.unit(&[(0, lambda)], 0.0);
    f.emit(u, 0, 1.0 / lambda);
    let layer = concat_layer(1, vec![], f.build());
    let block = GadgetBlock {
        kind: GadgetKind::Relu,
        layers: vec![layer],
        in_channels: named(&[("x", 0)]),
        out_channels: named(&[("relu", 1)]),
        eps_budget: eps,
        lipschitz: 1.0,
        max_weight_bound: 256f64.max(0.8 / eps),
        tag: format!("relu(eps={eps}, lambda={lambda})"),
    };
    block.assert_well_formed();
    block
}

/// Componentwise branch: out_i = x_i if t ≥ α, y_i if t ≤ −α, for
/// ‖x‖∞, ‖y‖∞ ≤ M, within eps. Inputs with |t| < α are the documented
/// dead zone: the output interpolates and no error is raised.
///
/// Each component uses one saturating ReLU pair,
/// out_i = y_i + ½[R(x_i − y_i + g·t) − R(y_i − x_i + g·t)], g = 2M/α:
/// at t ≥ α both arguments clear zero, the pair is linear and yields
/// x_i − y_i; at t ≤ −α both arguments are below zero and the pair
/// vanishes. y_i passes through the additive residual.
pub fn build_selector_unit(d: usize, m_bound: f64, alpha: f64, eps: f64) -> GadgetBlock {
    assert!(d >= 1, "selector needs at least one component");
    assert!(m_bound >= 1.0, "selector needs M >= 1");
    assert!(alpha > 0.0, "selector needs a positive threshold margin");
    assert!(eps > 0.0 && eps < 1.0, "selector needs eps in (0, 1)");
    let lambda = pow2_at_least(LAMBDA.max(1.0 / (eps * sqrt_2pi())));
    let gate = 2.0 * m_bound / alpha;
    let d_in = 2 * d + 1;
    let t_ch = 2 * d;
    let mut f = FfnAssembler::new(d_in, d_in);
    for i in 0..d {
        let up = f.unit(&[(i, lambda), (d + i, -lambda), (t_ch, lambda * gate)], 0.0);
        let dn = f.unit(&[(i, -lambda), (d + i, lambda), (t_ch, lambda * gate)], 0.0);
        f.emit(up, d + i, 0.5 / lambda);
        f.emit(dn, d + i, -0.5 / lambda);
    }
    let layer = LayerSpec {
        heads: vec![],
        ffn: f.build(),
        residual_mode: ResidualMode::Add,
        d_in,
        d_out: d_in,
    };
    let mut in_channels = BTreeMap::new();
    let mut out_channels = BTreeMap::new();
    for i in 0..d {
        in_channels.insert(format!("x{i}"), i);
        in_channels.insert(format!("y{i}"), d + i);
        out_channels.insert(format!("out{i}"), d + i);
    }
    in_channels.insert("t".to_string(), t_ch);
    let block = GadgetBlock {
        kind: GadgetKind::Select,
        layers: vec![layer],
        in_channels,
        out_channels,
        eps_budget: eps,
        lipschitz: 1.0,
        max_weight_bound: 256f64.max(0.8 / eps) * (1.0 + 2.0 * m_bound / alpha),
        tag: format!("select(d={d}, M={m_bound}, alpha={alpha}, eps={eps})"),
    };
    block.assert_well_formed();
    block
}

/// ⌊i/n⌋ for integers i ∈ [1, n²], exact up to GeLU tail residue
/// (~1e-220), via the indicator sum ⌊i/n⌋ = Σ_{j=1..n} I[i ≥ jn] with
/// hidden width 2n. Inputs outside the stated range are the caller's
/// contract violation; compilers range-check before building tapes.
pub fn build_floor_div_unit(n: usize) -> GadgetBlock {
    assert!(n >= 1, "floor unit needs n >= 1");
    let mut f = FfnAssembler::new(1, 1);
    for j in 1..=n {
        let (hi, lo) = add_indicator(&mut f, 0, (j * n) as f64);
        f.emit(hi, 0, 2.0 / LAMBDA);
        f.emit(lo, 0, -2.0 / LAMBDA);
    }
    let layer = concat_layer(1, vec![], f.build());
    let block = GadgetBlock {
        kind: GadgetKind::FloorDiv,
        layers: vec![layer],
        in_channels: named(&[("i", 0)]),
        out_channels: named(&[("floor", 1)]),
        eps_budget: EXACT_BUDGET,
        lipschitz: 1.0,
        max_weight_bound: LAMBDA * ((n * n) as f64 + 1.0),
        tag: format!("floor_div(n={n})"),
    };
    block.assert_well_formed();
    block
}

/// i mod n for integers i ∈ [1, n²]: the same indicator sum scaled by
/// −n lands on i's own channel through the additive residual, leaving
/// i − n⌊i/n⌋.
pub fn build_mod_unit(n: usize) -> GadgetBlock {
    assert!(n >= 1, "mod unit needs n >= 1");
    let mut f = FfnAssembler::new(1, 1);
    for j in 1..=n {
        let (hi, lo) = add_indicator(&mut f, 0, (j * n) as f64);
        f.emit(hi, 0, -2.0 * n as f64 / LAMBDA);
        f.emit(lo, 0, 2.0 * n as f64 / LAMBDA);
    }
    let layer = LayerSpec {
        heads: vec![],
        ffn: f.build(),
        residual_mode: ResidualMode::Add,
        d_in: 1,
        d_out: 1,
    };
    let block = GadgetBlock {
        kind: GadgetKind::Mod,
        layers: vec![layer],
        in_channels: named(&[("i", 0)]),
        out_channels: named(&[("mod", 0)]),
        eps_budget: EXACT_BUDGET,
        lipschitz: 1.0,
        max_weight_bound: LAMBDA * ((n * n) as f64 + 1.0),
        tag: format!("mod(n={n})"),
    };
    block.assert_well_formed();
    block
}
