use super::HeatParams;
use crate::error::{Error, Result};
use crate::grid::ScalarField;

/// Diffuses the edge map as a temperature field.
///
/// Forward Euler on the 5-point Laplacian. Boundaries are zero-flux: the
/// missing neighbor of a border cell takes the cell's own value, so the
/// total heat is conserved.
pub fn heat_potential(edge: &ScalarField, p: &HeatParams) -> Result<ScalarField> {
    p.validate()?;
    if edge.values().iter().any(|&g| g < 0.0) {
        return Err(Error::InvalidParameter(
            "edge map must be nonnegative".into(),
        ));
    }
    let (w, h) = edge.shape();
    let mut cur = edge.clone().into_values();
    let mut next = vec![0.0; w * h];
    for _ in 0..p.steps {
        diffuse_step(&cur, &mut next, w, h, p.dt);
        std::mem::swap(&mut cur, &mut next);
    }
    ScalarField::new(w, h, cur)
}

/// Applies `T + dt * Laplacian(T)` with reflecting borders.
pub(crate) fn diffuse_step(cur: &[f64], next: &mut [f64], w: usize, h: usize, dt: f64) {
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let c = cur[i];
            let west = if x > 0 { cur[i - 1] } else { c };
            let east = if x + 1 < w { cur[i + 1] } else { c };
            let north = if y > 0 { cur[i - w] } else { c };
            let south = if y + 1 < h { cur[i + w] } else { c };
            next[i] = c + dt * (west + east + north + south - 4.0 * c);
        }
    }
}

/// Discrete Laplacian with the same reflecting borders.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let (w, h) = f.shape();
    let mut out = vec![0.0; w * h];
    // dt = 1 yields T + L(T); subtract T back out
    diffuse_step(f.values(), &mut out, w, h, 1.0);
    for (o, v) in out.iter_mut().zip(f.values()) {
        *o -= v;
    }
    ScalarField::new(w, h, out).expect("shape preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_steps_is_identity() {
        let e = ScalarField::from_fn(5, 4, |x, y| (x * y) as f64 * 0.1).unwrap();
        let out = heat_potential(&e, &HeatParams { steps: 0, dt: 0.2 }).unwrap();
        assert_eq!(out, e);
    }

    #[test]
    fn single_stencil_on_impulse() {
        let mut e = ScalarField::zeros(3, 3).unwrap();
        e.set(1, 1, 1.0);
        let out = heat_potential(&e, &HeatParams { steps: 1, dt: 0.25 }).unwrap();
        let want = [0.0, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0];
        assert_eq!(out.values(), &want);
    }

    #[test]
    fn rejects_unstable_dt() {
        let e = ScalarField::zeros(3, 3).unwrap();
        assert!(heat_potential(&e, &HeatParams { steps: 1, dt: 0.3 }).is_err());
    }

    fn arb_field() -> impl Strategy<Value = ScalarField> {
        (3usize..14, 3usize..14).prop_flat_map(|(w, h)| {
            prop::collection::vec(0.0f64..1.0, w * h)
                .prop_map(move |v| ScalarField::new(w, h, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn conserves_total_heat(e in arb_field(), dt in 0.01f64..=0.25) {
            let before = e.sum();
            let out = heat_potential(&e, &HeatParams { steps: 100, dt }).unwrap();
            prop_assert!((out.sum() - before).abs() <= 1e-9 * before.max(1e-300));
        }

        #[test]
        fn laplacian_energy_never_grows(e in arb_field(), dt in 0.01f64..=0.25) {
            let energy = |f: &ScalarField| laplacian(f).values().iter().map(|v| v * v).sum::<f64>();
            let mut f = e;
            let mut prev = energy(&f);
            for _ in 0..20 {
                f = heat_potential(&f, &HeatParams { steps: 1, dt }).unwrap();
                let cur = energy(&f);
                prop_assert!(cur <= prev * (1.0 + 1e-12) + 1e-15);
                prev = cur;
            }
        }
    }
}
