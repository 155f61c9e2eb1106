//! Closed forms for the Navier–Stokes system of [`crate::pde::ns_system`].

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::jet::{initial_slots, SolveHook};
use crate::geom::{AxisBox, MultiIndex};
use crate::pde::PdeSystem;
use crate::poly::Poly;

/// Closed-form jets for incompressible Navier–Stokes.
///
/// Away from `t = 0` the jet is `u = 0`, `p = 0`, `∂_t u_i = g_i` and
/// `∂_1 u_1 = g_4`: every nonlinear and viscous term vanishes.
///
/// On the initial layer `u(x, 0) = u0(x)` fixes the divergence at `t = 0`,
/// so no jet at the anchor can move it. The patch instead ramps it in time:
/// `u_i = u0_i + t (c_i + β δ_{i1} (x_1 - a_1))` and
/// `p = -β (x_1 - a_1)^2 / 2`, where `β` brings the divergence to `g_4` at
/// the top of the cell and the pressure gradient cancels the extra
/// `∂_t u_1`. The constants `c_i` fit the momentum equations at the anchor.
#[derive(Clone, Copy, Debug, Default)]
pub struct NavierStokesHook;

struct Layout {
    p: usize,
    u: [usize; 3],
}

fn layout(sys: &PdeSystem) -> Option<Layout> {
    let names = sys.jets().unknowns();
    if sys.len() != 4 || sys.n_space() != 3 || !sys.has_time() || names.len() != 4 {
        return None;
    }
    let at = |n: &str| names.iter().position(|s| s == n);
    Some(Layout { p: at("p")?, u: [at("u1")?, at("u2")?, at("u3")?] })
}

fn dt() -> MultiIndex {
    MultiIndex::axis(4, 3, 1)
}

impl SolveHook for NavierStokesHook {
    fn jet(&self, sys: &PdeSystem, _x: &[f64], target: &[f64]) -> Option<Vec<f64>> {
        layout(sys)?;
        let spec = sys.jets();
        let mut jet = vec![0.0; spec.len()];
        for (i, name) in ["u1", "u2", "u3"].iter().enumerate() {
            jet[spec.slot(name, &dt())?] = target[i];
        }
        jet[spec.slot("u1", &MultiIndex::axis(4, 0, 1))?] = target[3];
        Some(jet)
    }

    fn initial_patch(
        &self,
        sys: &PdeSystem,
        cell: &AxisBox,
        anchor: &[f64],
        target: &[f64],
        u0: &[Option<Poly>],
    ) -> Option<Vec<Poly>> {
        let l = layout(sys)?;
        let q: Vec<&Poly> = l.u.iter().map(|u| u0.get(*u)?.as_ref()).collect::<Option<_>>()?;
        let spec = sys.jets();
        let jet0: Vec<f64> = initial_slots(spec, anchor, u0).into_iter().map(|v| v.unwrap_or(0.0)).collect();
        let (f0, jac) = sys.jacobian(anchor, &jet0).ok()?;
        let mut c = [0.0; 3];
        for i in 0..3 {
            let a = jac[i][spec.slot(&spec.unknowns()[l.u[i]], &dt())?];
            if a == 0.0 {
                return None;
            }
            c[i] = (target[i] - f0[i]) / a;
        }
        let height = cell.hi()[3] - anchor[3];
        let beta = (target[3] - f0[3]) / height;
        let center = anchor.to_vec();
        let mono = |terms: &[([u32; 4], f64)]| {
            let m: BTreeMap<MultiIndex, f64> =
                terms.iter().filter(|(_, v)| *v != 0.0).map(|(a, v)| (MultiIndex::new(a.to_vec()), *v)).collect();
            Poly::new(center.clone(), m, 2).ok()
        };
        let mut out = vec![Poly::zero(center.clone(), 2); 4];
        for i in 0..3 {
            let mut terms = vec![([0, 0, 0, 1], c[i])];
            if i == 0 {
                terms.push(([1, 0, 0, 1], beta));
            }
            let base = q[i].extend_last_axis(0.0);
            let sum = base.add(&mono(&terms)?).ok()?;
            let d = sum.degree().max(2);
            out[l.u[i]] = sum.with_degree(d).ok()?;
        }
        out[l.p] = mono(&[([2, 0, 0, 0], -beta / 2.0)])?;
        Some(out)
    }
}
