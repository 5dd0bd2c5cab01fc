use thiserror::Error;

use super::model::{Model, ModelError, Terms};
use crate::lp::Relation;

/// Which guard value switches a big-M row on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BigMVariant {
    /// `κ = 0` is active: `body >= rhs - M κ`.
    Deactivate,
    /// `κ = 1` is active: `body >= rhs - M (1 - κ)`.
    Activate,
}

impl BigMVariant {
    fn active_when(self) -> bool {
        self == BigMVariant::Activate
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BigMError {
    #[error("indicator `{0}` has a body with unbounded range; no finite M exists")]
    UnboundedBody(String),
    #[error("guard `{0}` is used with both polarities")]
    MixedPolarity(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Name given to a guard after complementing it.
pub fn complement_name(name: &str) -> String {
    format!("{name}_c")
}

/// Replaces every indicator by a big-M row whose guard polarity matches
/// `variant`. Guards used with the other polarity are complemented
/// (`κ' = 1 - κ`) throughout the model first, so the feasible set and the
/// objective are unchanged. `M` comes from the stored variable bounds only.
pub fn to_bigm(model: &Model, variant: BigMVariant) -> Result<Model, BigMError> {
    if model.indicators().is_empty() {
        return Ok(model.clone());
    }
    let n = model.num_vars();
    let want = variant.active_when();
    let mut flip = vec![None::<bool>; n];
    for ind in model.indicators() {
        let needs = ind.active_when != want;
        match flip[ind.guard] {
            Some(prev) if prev != needs => {
                return Err(BigMError::MixedPolarity(model.variables()[ind.guard].name.clone()))
            }
            _ => flip[ind.guard] = Some(needs),
        }
    }
    let flipped: Vec<bool> = flip.iter().map(|f| f.unwrap_or(false)).collect();

    let mut out = Model::new();
    for (j, v) in model.variables().iter().enumerate() {
        if flipped[j] {
            out.add_variable(&complement_name(&v.name), v.kind, 1.0 - v.upper, 1.0 - v.lower)?;
        } else {
            out.add_variable(&v.name, v.kind, v.lower, v.upper)?;
        }
    }
    // c κ = c - c κ'
    let substitute = |terms: &[(usize, f64)]| -> (Terms, f64) {
        let mut shift = 0.0;
        let terms = terms
            .iter()
            .map(|&(j, c)| {
                if flipped[j] {
                    shift += c;
                    (j, -c)
                } else {
                    (j, c)
                }
            })
            .collect();
        (terms, shift)
    };
    let (objective, shift) = substitute(model.objective());
    out.set_objective(objective, model.objective_constant() + shift)?;
    for c in model.constraints() {
        let (terms, shift) = substitute(&c.terms);
        out.add_constraint(&c.name, terms, c.relation, c.rhs - shift)?;
    }
    let var_bounds: Vec<(f64, f64)> = out.variables().iter().map(|v| (v.lower, v.upper)).collect();
    for ind in model.indicators() {
        let (terms, shift) = substitute(&ind.terms);
        let rhs = ind.rhs - shift;
        let range = |sign: f64| -> Result<f64, BigMError> {
            // max of sign * body over the variable box
            let mut total = 0.0;
            for &(j, c) in &terms {
                let (lower, upper) = var_bounds[j];
                let s = sign * c;
                total += if s >= 0.0 { s * upper } else { s * lower };
            }
            if total.is_finite() {
                Ok(total)
            } else {
                Err(BigMError::UnboundedBody(ind.name.clone()))
            }
        };
        let g = ind.guard;
        let mut emit = |name: &str, relation: Relation| -> Result<(), BigMError> {
            // Ge: body >= rhs, relaxed by M = rhs - min body when inactive.
            // Le: body <= rhs, relaxed by M = max body - rhs.
            let (m, sign) = match relation {
                Relation::Ge => ((rhs + range(-1.0)?).max(0.0), -1.0),
                Relation::Le => ((range(1.0)? - rhs).max(0.0), 1.0),
                Relation::Eq => unreachable!(),
            };
            let mut row = terms.clone();
            let rhs = match variant {
                // body  >=  rhs - M (1 - g)   /   body  <=  rhs + M (1 - g)
                BigMVariant::Activate => {
                    row.push((g, sign * m));
                    rhs + sign * m
                }
                // body  >=  rhs - M g   /   body  <=  rhs + M g
                BigMVariant::Deactivate => {
                    row.push((g, -sign * m));
                    rhs
                }
            };
            out.add_constraint(name, row, relation, rhs)?;
            Ok(())
        };
        match ind.relation {
            Relation::Eq => {
                emit(&format!("{}_lo", ind.name), Relation::Ge)?;
                emit(&format!("{}_hi", ind.name), Relation::Le)?;
            }
            r => emit(&ind.name, r)?,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::model::VarKind;
    use proptest::prelude::*;

    /// `y >= Q_k(x)` for fixed `x` via the indicator gadget with `n - k + 1`
    /// active guards.
    fn gadget(x: &[f64], k: usize, active_when: bool) -> Model {
        let n = x.len();
        let mut m = Model::new();
        let y = m.add_continuous("y", 0.0, f64::INFINITY).unwrap();
        let xs: Vec<usize> =
            x.iter().enumerate().map(|(i, &v)| m.add_continuous(&format!("x{i}"), v, v).unwrap()).collect();
        let ks: Vec<usize> = (0..n).map(|i| m.add_binary(&format!("k{i}")).unwrap()).collect();
        for i in 0..n {
            m.add_indicator(&format!("g{i}"), ks[i], active_when, vec![(y, 1.0), (xs[i], -1.0)], Relation::Ge, 0.0)
                .unwrap();
        }
        let active = (n - k + 1) as f64;
        let count = if active_when { active } else { n as f64 - active };
        m.add_constraint("card", ks.iter().map(|&j| (j, 1.0)).collect(), Relation::Eq, count).unwrap();
        m.set_objective(vec![(y, 1.0)], 0.0).unwrap();
        m
    }

    /// Minimum of `y` over every guard assignment, for a big-M model whose
    /// only free continuous variable is `y` (index 0).
    fn min_y_by_enumeration(m: &Model) -> f64 {
        let binaries: Vec<usize> =
            (0..m.num_vars()).filter(|&j| m.variables()[j].kind == VarKind::Binary).collect();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << binaries.len()) {
            let mut x: Vec<f64> = m.variables().iter().map(|v| v.lower).collect();
            for (b, &j) in binaries.iter().enumerate() {
                x[j] = (mask >> b & 1) as f64;
            }
            // smallest y satisfying every row
            let mut lo: f64 = 0.0;
            let mut ok = true;
            for c in m.constraints() {
                let a_y: f64 = c.terms.iter().filter(|t| t.0 == 0).map(|t| t.1).sum();
                let rest: f64 = c.terms.iter().filter(|t| t.0 != 0).map(|&(j, v)| v * x[j]).sum();
                match (c.relation, a_y > 0.0) {
                    (Relation::Ge, true) => lo = lo.max((c.rhs - rest) / a_y),
                    (Relation::Ge, false) if a_y == 0.0 => ok &= rest >= c.rhs - 1e-9,
                    (Relation::Eq, _) if a_y == 0.0 => ok &= (rest - c.rhs).abs() <= 1e-9,
                    (Relation::Le, _) if a_y == 0.0 => ok &= rest <= c.rhs + 1e-9,
                    _ => panic!("unexpected row shape"),
                }
            }
            if ok {
                best = best.min(lo);
            }
        }
        best
    }

    #[test]
    fn no_indicators_is_identity() {
        let mut m = Model::new();
        let x = m.add_binary("x").unwrap();
        m.add_constraint("c", vec![(x, 1.0)], Relation::Le, 1.0).unwrap();
        assert_eq!(to_bigm(&m, BigMVariant::Activate).unwrap(), m);
        assert_eq!(to_bigm(&m, BigMVariant::Deactivate).unwrap(), m);
    }

    #[test]
    fn gadget_minimum_is_the_quantile() {
        for (x, k, want) in [
            (vec![2.0, 1.0, 1.0, 0.0], 2, 1.0),
            (vec![0.5, 3.0, 1.0], 1, 3.0),
            (vec![0.5, 3.0, 1.0], 3, 0.5),
        ] {
            for polarity in [true, false] {
                for variant in [BigMVariant::Activate, BigMVariant::Deactivate] {
                    let m = to_bigm(&gadget(&x, k, polarity), variant).unwrap();
                    assert_eq!(min_y_by_enumeration(&m), want, "{x:?} k={k} {variant:?}");
                }
            }
        }
    }

    #[test]
    fn deactivate_complements_the_cardinality_row() {
        let m = to_bigm(&gadget(&[2.0, 1.0, 1.0, 0.0], 2, true), BigMVariant::Deactivate).unwrap();
        let card = m.constraints().iter().find(|c| c.name == "card").unwrap();
        // sum (1 - k') = 3  <=>  -sum k' = -1, i.e. k - 1 inactive guards
        assert_eq!(card.rhs, -1.0);
        assert!(card.terms.iter().all(|t| t.1 == -1.0));
        assert_eq!(m.variables()[5].name, "k0_c");
        let g0 = m.constraints().iter().find(|c| c.name == "g0").unwrap();
        // y - x0 >= -M k0', M = 0 - (0 - 2) = 2
        assert!(g0.terms.contains(&(5, 2.0)));
        assert_eq!(g0.rhs, 0.0);
    }

    #[test]
    fn errors() {
        let mut m = Model::new();
        let g = m.add_binary("g").unwrap();
        let y = m.add_continuous("y", f64::NEG_INFINITY, 1.0).unwrap();
        m.add_indicator("i", g, true, vec![(y, 1.0)], Relation::Ge, 0.0).unwrap();
        assert_eq!(to_bigm(&m, BigMVariant::Activate), Err(BigMError::UnboundedBody("i".into())));
        m.set_bounds(y, 0.0, 1.0).unwrap();
        m.add_indicator("j", g, false, vec![(y, 1.0)], Relation::Le, 0.5).unwrap();
        assert_eq!(to_bigm(&m, BigMVariant::Activate), Err(BigMError::MixedPolarity("g".into())));
    }

    #[test]
    fn equality_indicator_splits() {
        let mut m = Model::new();
        let g = m.add_binary("g").unwrap();
        let y = m.add_continuous("y", 0.0, 4.0).unwrap();
        m.add_indicator("i", g, true, vec![(y, 1.0)], Relation::Eq, 1.0).unwrap();
        let b = to_bigm(&m, BigMVariant::Activate).unwrap();
        let names: Vec<&str> = b.constraints().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["i_lo", "i_hi"]);
        for (gv, yv, feasible) in [(1.0, 1.0, true), (1.0, 2.0, false), (0.0, 4.0, true), (0.0, 0.0, true)] {
            assert_eq!(b.max_violation(&[gv, yv]) <= 1e-12, feasible, "g={gv} y={yv}");
        }
    }

    proptest! {
        #[test]
        fn gadget_preserves_the_quantile(
            (x, k) in prop::collection::vec((0i32..12).prop_map(|v| f64::from(v) / 2.0), 1..=6)
                .prop_flat_map(|x| { let n = x.len(); (Just(x), 1..=n) }),
            polarity in any::<bool>(),
        ) {
            let want = crate::quantile::q_k(&x, k).unwrap();
            for variant in [BigMVariant::Activate, BigMVariant::Deactivate] {
                let m = to_bigm(&gadget(&x, k, polarity), variant).unwrap();
                prop_assert_eq!(min_y_by_enumeration(&m), want);
            }
        }
    }
}
