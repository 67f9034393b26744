use serde_json::json;

use super::{CompileError, GateParams};
use crate::geometry::{ball_polytope, facet_count_for_tolerance, BallCover, ConvexComponent};
use crate::network::{Activation, Head, Layer, NetworkSpec};

/// How the gates of a ball become facets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FacetRule {
    /// Per ball, the fewest facets keeping the polytope within this distance.
    Tolerance(f64),
    /// The same number of facets for every ball.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionOptions {
    /// Reject parameters outside the margin bounds and raise `λ` to `4a_δ`.
    /// When false, violations are only logged and `λ` is used as given.
    pub enforce_margins: bool,
    /// Scale `α` of the head `α(Σ_r σ(λJ_r) − ½)`.
    pub head_scale: f64,
}

impl Default for UnionOptions {
    fn default() -> Self {
        UnionOptions { enforce_margins: true, head_scale: 1.0 }
    }
}

fn gate_layer(comps: &[&ConvexComponent], kappa: f64) -> Layer {
    let mut w = Vec::new();
    let mut b = Vec::new();
    for comp in comps {
        for f in &comp.facets {
            w.push(f.u.iter().map(|u| -kappa * u).collect());
            b.push(kappa * f.h);
        }
    }
    Layer::dense(w, b, Activation::Logistic { k: 1.0 })
}

fn check_component(comp: &ConvexComponent, index: usize, dim: usize) -> Result<(), CompileError> {
    if comp.facets.is_empty() {
        return Err(CompileError::EmptyComponent(index));
    }
    if comp.dim != dim {
        return Err(CompileError::DimensionMismatch { expected: dim, got: comp.dim });
    }
    if !comp.is_bounded() {
        return Err(CompileError::Unbounded(index));
    }
    Ok(())
}

/// Single hidden layer of gates `σ(κ(h_ℓ − ⟨u_ℓ, x⟩))` with unit output
/// weights and threshold `m − ½`.
pub fn compile_convex(comp: &ConvexComponent, kappa: f64) -> Result<NetworkSpec, CompileError> {
    check_component(comp, 0, comp.dim)?;
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(CompileError::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    let m = comp.len() as f64;
    Ok(NetworkSpec::new(
        vec![gate_layer(&[comp], kappa)],
        Head { tau: m - 0.5, scale: 1.0 },
        Some(json!({ "kind": "convex", "kappa": kappa, "component": comp })),
    )?)
}

pub fn compile_union(comps: &[ConvexComponent], params: &GateParams) -> Result<NetworkSpec, CompileError> {
    compile_union_with(comps, params, &UnionOptions::default())
}

/// Two-layer union network.
///
/// Layer one holds every gate; layer two computes `σ(λ J_r)` with
/// `J_r = Σ_ℓ s_{r,ℓ} − (m_r − ½)` over the gates of component `r`; the head
/// thresholds `Σ_r σ(λ J_r)` at `½`.
pub fn compile_union_with(
    comps: &[ConvexComponent],
    params: &GateParams,
    opts: &UnionOptions,
) -> Result<NetworkSpec, CompileError> {
    let (layers, lambda) = union_layers(comps, params, opts)?;
    NetworkSpec::new(
        layers,
        Head { tau: 0.5, scale: opts.head_scale },
        Some(json!({
            "kind": "union",
            "kappa": params.kappa,
            "lambda": lambda,
            "eta": params.eta,
            "delta": params.delta,
            "head_scale": opts.head_scale,
            "components": comps,
        })),
    )
    .map_err(CompileError::from)
}

fn union_layers(
    comps: &[ConvexComponent],
    params: &GateParams,
    opts: &UnionOptions,
) -> Result<(Vec<Layer>, f64), CompileError> {
    let first = comps.first().ok_or(CompileError::NoComponents)?;
    params.validate()?;
    if !(opts.head_scale > 0.0) || !opts.head_scale.is_finite() {
        return Err(CompileError::InvalidParameter(format!("head scale must be positive, got {}", opts.head_scale)));
    }
    for (i, c) in comps.iter().enumerate() {
        check_component(c, i, first.dim)?;
    }
    let big_m = comps.iter().map(|c| c.len()).max().unwrap_or(1);
    let big_r = comps.len();
    let mut problems = Vec::new();
    if !(params.eta < 1.0 / (4 * big_m) as f64) {
        problems.push(format!("eta = {} is not below 1/(4M) = {}", params.eta, 1.0 / (4 * big_m) as f64));
    }
    if !(params.delta <= 1.0 / (4 * big_r) as f64) {
        problems.push(format!("delta = {} exceeds 1/(4R) = {}", params.delta, 1.0 / (4 * big_r) as f64));
    }
    let floor = 4.0 * params.a_delta();
    let lambda = if opts.enforce_margins {
        if !problems.is_empty() {
            return Err(CompileError::MarginViolation(problems.join("; ")));
        }
        params.lambda.max(floor)
    } else {
        for p in &problems {
            log::warn!("margin override: {p}");
        }
        if params.lambda < floor {
            log::warn!("margin override: lambda = {} is below 4·a_delta = {floor}", params.lambda);
        }
        params.lambda
    };

    let refs: Vec<&ConvexComponent> = comps.iter().collect();
    let gates = gate_layer(&refs, params.kappa);
    let mut connect = Vec::with_capacity(big_r);
    let mut w = Vec::with_capacity(big_r);
    let mut b = Vec::with_capacity(big_r);
    let mut start = 0;
    for c in comps {
        connect.push((start..start + c.len()).collect());
        w.push(vec![1.0; c.len()]);
        b.push(-(c.len() as f64 - 0.5));
        start += c.len();
    }
    let outer = Layer::sparse(start, connect, w, b, Activation::Logistic { k: lambda });
    Ok((vec![gates, outer], lambda))
}

/// Compiles a ball cover: each ball becomes its circumscribed polytope and
/// the polytopes are joined by [`compile_union_with`].
pub fn compile_ball_cover_with(
    cover: &BallCover,
    rule: FacetRule,
    params: &GateParams,
    opts: &UnionOptions,
) -> Result<NetworkSpec, CompileError> {
    if cover.balls.is_empty() {
        return Err(CompileError::NoComponents);
    }
    if let FacetRule::Tolerance(eps) = rule {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(CompileError::InvalidParameter(format!("eps_poly must be positive, got {eps}")));
        }
    }
    let mut comps = Vec::with_capacity(cover.balls.len());
    let mut balls = Vec::with_capacity(cover.balls.len());
    for (j, ball) in cover.balls.iter().enumerate() {
        let m = match rule {
            FacetRule::Tolerance(eps) => facet_count_for_tolerance(ball.r, eps, cover.dim)?,
            FacetRule::Fixed(m) => m,
        };
        comps.push(ball_polytope(&ball.c, ball.r, m, cover.dim, j as u64)?);
        balls.push(json!({ "c": ball.c, "r": ball.r, "m": m }));
    }
    let (layers, lambda) = union_layers(&comps, params, opts)?;
    NetworkSpec::new(
        layers,
        Head { tau: 0.5, scale: opts.head_scale },
        Some(json!({
            "kind": "ball_cover",
            "kappa": params.kappa,
            "lambda": lambda,
            "eta": params.eta,
            "delta": params.delta,
            "head_scale": opts.head_scale,
            "balls": balls,
        })),
    )
    .map_err(CompileError::from)
}

pub fn compile_ball_cover(cover: &BallCover, eps_poly: f64, params: &GateParams) -> Result<NetworkSpec, CompileError> {
    compile_ball_cover_with(cover, FacetRule::Tolerance(eps_poly), params, &UnionOptions::default())
}

/// Whether `x` lies in a gate band `|h − ⟨u, x⟩| < w_η` of any facet.
pub fn in_gate_band(comps: &[ConvexComponent], params: &GateParams, x: &[f64]) -> bool {
    let w = params.band();
    comps.iter().flat_map(|c| &c.facets).any(|f| f.slack(x).abs() < w)
}

/// Whether some component score satisfies `|J_r(x)| < a_δ / λ`.
pub fn in_outer_band(comps: &[ConvexComponent], params: &GateParams, lambda: f64, x: &[f64]) -> bool {
    let z = params.a_delta() / lambda;
    comps.iter().any(|c| {
        let j: f64 = c.facets.iter().map(|f| crate::network::sigmoid(params.kappa * f.slack(x))).sum::<f64>()
            - (c.len() as f64 - 0.5);
        j.abs() < z
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::margin_params;
    use crate::geometry::{polygon_facets, Ball};
    use crate::network::sigmoid;

    fn unit_square() -> ConvexComponent {
        polygon_facets(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn square_at(x: f64, y: f64) -> ConvexComponent {
        polygon_facets(&[[x, y], [x + 1.0, y], [x + 1.0, y + 1.0], [x, y + 1.0]]).unwrap()
    }

    #[test]
    fn convex_square_examples() {
        let spec = compile_convex(&unit_square(), 30.0).unwrap();
        assert_eq!(spec.head.tau, 3.5);
        assert_eq!(spec.layers.len(), 1);
        let inside = spec.forward(&[0.5, 0.5]).unwrap();
        assert!((inside.score - 4.0 * sigmoid(15.0)).abs() < 1e-15);
        assert!((inside.score - 4.0).abs() < 2e-6);
        assert!(inside.decision());
        let outside = spec.forward(&[2.0, 0.5]).unwrap();
        assert!((outside.score - 3.0).abs() < 1e-5);
        assert!(!outside.decision());
        // on the facet x = 1 with the other gates deep inside
        let spec = compile_convex(&square_at(-50.0, -50.0), 30.0).unwrap();
        let edge = spec.forward(&[-49.0, -49.5]).unwrap();
        let gates: Vec<f64> = spec.layers[0]
            .w
            .iter()
            .zip(&spec.layers[0].b)
            .map(|(w, b)| sigmoid(w[0] * -49.0 + w[1] * -49.5 + b))
            .collect();
        assert_eq!(gates[1], 0.5);
        assert!(edge.score > 3.0);
    }

    #[test]
    fn rejects_bad_components() {
        assert!(matches!(
            compile_union(&[], &GateParams::from_margins(4, 1, 30.0).unwrap()),
            Err(CompileError::NoComponents)
        ));
        let half = ConvexComponent::new(2, vec![crate::geometry::Facet { u: vec![1.0, 0.0], h: 0.0 }]).unwrap();
        assert!(matches!(compile_convex(&half, 10.0), Err(CompileError::Unbounded(0))));
    }

    #[test]
    fn single_component_union_matches_convex_sign() {
        let sq = unit_square();
        let params = GateParams::from_margins(4, 1, 30.0).unwrap();
        let u = compile_union(&[sq.clone()], &params).unwrap();
        let c = compile_convex(&sq, 30.0).unwrap();
        for i in 0..50 {
            for j in 0..50 {
                let x = [-0.5 + 2.0 * i as f64 / 49.0, -0.5 + 2.0 * j as f64 / 49.0];
                let j1 = c.forward(&x).unwrap().score - 3.5;
                if j1.abs() > 1e-9 {
                    assert_eq!(u.forward(&x).unwrap().decision(), j1 >= 0.0, "{x:?}");
                }
            }
        }
    }

    #[test]
    fn two_squares() {
        let comps = [square_at(-2.0, 0.0), square_at(1.0, 0.0)];
        let mg = margin_params(4, 2).unwrap();
        let params = GateParams::new(30.0, mg.lambda, mg.eta, mg.delta).unwrap();
        let spec = compile_union(&comps, &params).unwrap();
        assert_eq!(spec.unit_counts(), vec![8, 2]);
        for x in [[-1.5, 0.5], [1.5, 0.5]] {
            assert!(spec.forward(&x).unwrap().score >= 1.0 - params.delta);
        }
        for x in [[0.0, 0.5], [5.0, 5.0], [-1.5, 3.0]] {
            assert!(spec.forward(&x).unwrap().score <= 2.0 * params.delta);
        }
    }

    #[test]
    fn margins_enforced_or_overridden() {
        let comps = [unit_square()];
        let loose = GateParams::new(30.0, 1.0, 0.2, 0.4).unwrap();
        assert!(matches!(compile_union(&comps, &loose), Err(CompileError::MarginViolation(_))));
        let opts = UnionOptions { enforce_margins: false, head_scale: 6.0 };
        let spec = compile_union_with(&comps, &loose, &opts).unwrap();
        assert_eq!(spec.layers[1].act, Activation::Logistic { k: 1.0 });
        assert_eq!(spec.head.scale, 6.0);

        let mut tight = GateParams::from_margins(4, 1, 30.0).unwrap();
        tight.lambda = 1.0;
        let spec = compile_union(&comps, &tight).unwrap();
        assert_eq!(spec.layers[1].act, Activation::Logistic { k: 4.0 * tight.a_delta() });
    }

    #[test]
    fn ball_cover_examples() {
        let cover = BallCover::new(2, vec![Ball { c: vec![0.0, 0.0], r: 1.0 }]).unwrap();
        let params = GateParams::from_margins(23, 1, 30.0).unwrap();
        let spec = compile_ball_cover(&cover, 0.01, &params).unwrap();
        assert_eq!(spec.unit_counts(), vec![23, 1]);
        assert!(compile_ball_cover(&cover, 0.0, &params).is_err());
        let prov = spec.provenance.as_ref().unwrap();
        assert_eq!(prov["balls"][0]["m"], 23);
    }

    #[test]
    fn json_round_trip() {
        let comps = [square_at(-2.0, 0.0), square_at(1.0, 0.0)];
        let params = GateParams::from_margins(4, 2, 30.0).unwrap();
        for spec in [compile_union(&comps, &params).unwrap(), compile_convex(&comps[0], 7.5).unwrap()] {
            let text = spec.to_json();
            let back: NetworkSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
        }
    }
}
