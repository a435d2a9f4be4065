//! Unary Bin Packing to fair matching.
//!
//! Items, bins and colors are 1-based; color `c ∈ [m+1]` has index `c-1`.

use serde::{Deserialize, Serialize};

use crate::model::{ColorId, Instance, Matching};

use super::{structural_check, GadgetBuilder, Reduction, ReductionError, StructuralCheck, WitnessBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UbpInstance {
    items: Vec<usize>,
    m: usize,
    b: usize,
}

impl UbpInstance {
    pub fn new(items: Vec<usize>, m: usize, b: usize) -> Result<Self, ReductionError> {
        if m < 2 || b == 0 {
            return Err(ReductionError::InvalidUbp("need m >= 2 and B >= 1".into()));
        }
        if items.contains(&0) {
            return Err(ReductionError::InvalidUbp("item sizes must be positive".into()));
        }
        let total: usize = items.iter().sum();
        if total != m * b {
            return Err(ReductionError::InvalidUbp(format!(
                "items sum to {total}, expected m*B = {}",
                m * b
            )));
        }
        Ok(UbpInstance { items, m, b })
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Checks that `bins[i]` (1-based) fills every bin to exactly `B`.
    pub fn check_packing(&self, bins: &[usize]) -> Result<(), ReductionError> {
        if bins.len() != self.items.len() {
            return Err(ReductionError::InvalidPacking(format!(
                "{} bins given for {} items",
                bins.len(),
                self.items.len()
            )));
        }
        let mut load = vec![0; self.m + 1];
        for (&x, &j) in self.items.iter().zip(bins) {
            if !(1..=self.m).contains(&j) {
                return Err(ReductionError::InvalidPacking(format!("bin {j} out of range")));
            }
            load[j] += x;
        }
        match (1..=self.m).find(|&j| load[j] != self.b) {
            Some(j) => Err(ReductionError::InvalidPacking(format!(
                "bin {j} holds {}, capacity {}",
                load[j], self.b
            ))),
            None => Ok(()),
        }
    }

    /// `l + delta` wrapped into `[m]`.
    fn wrap(&self, l: usize, delta: usize) -> usize {
        (l - 1 + delta) % self.m + 1
    }

    /// `l + delta` wrapped into `[m+1]`, used inside the `H1` gadget so that
    /// `l`, `l+1` and `l+2` stay distinct for `m = 2`.
    fn wrap_inner(&self, l: usize, delta: usize) -> usize {
        (l - 1 + delta) % (self.m + 1) + 1
    }
}

fn color(c: usize) -> ColorId {
    c - 1
}

pub fn v_item_bin(i: usize, j: usize) -> String {
    format!("v[{i},{j}]")
}

fn h1(i: usize, j: usize) -> String {
    format!("H1[{i},{j}]")
}

pub fn reduce_ubp(ubp: &UbpInstance) -> Instance {
    reduce_ubp_with_provenance(ubp).instance
}

pub fn reduce_ubp_with_provenance(ubp: &UbpInstance) -> Reduction {
    let m = ubp.m;
    let top = m + 1;
    let mut g = GadgetBuilder::new(top);

    g.open("base", "H");
    let v0 = g.v("v0".into(), 0);
    let n = ubp.items.len();
    let mut vij = vec![vec![usize::MAX; m + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=m {
            vij[i][j] = g.v(v_item_bin(i, j), 0);
        }
    }
    for t in 1..=ubp.b {
        let u = g.u(format!("X[{t}]"), color(top));
        g.edge(u, v0);
    }
    for (i, &x) in (1..).zip(&ubp.items) {
        for j in 1..=m {
            for t in 1..=x {
                let u = g.u(format!("X_ij[{i},{j}].u[{t}]"), color(j));
                g.edge(u, v0);
                g.edge(u, vij[i][j]);
            }
        }
        for t in 1..=(m - 1) * x {
            let u = g.u(format!("Y[{i}].u[{t}]"), color(top));
            for j in 1..=m {
                g.edge(u, vij[i][j]);
            }
        }
    }

    for (i, &k) in (1..).zip(&ubp.items) {
        for j in 1..=m {
            let l = ubp.wrap(j, 1);
            let (c1, c2) = (ubp.wrap_inner(l, 1), ubp.wrap_inner(l, 2));
            let name = h1(i, j);
            g.open("h1", name.clone());
            let hat = vij[i][j];
            let u: Vec<usize> = (0..=k)
                .map(|t| {
                    if t == 0 {
                        usize::MAX
                    } else {
                        g.u(format!("{name}.u[{t}]"), color(l))
                    }
                })
                .collect();
            let up: Vec<usize> = (0..=k)
                .map(|t| match t {
                    0 => usize::MAX,
                    1 => g.u(format!("{name}.u'[1]"), color(c2)),
                    _ => g.u(format!("{name}.u'[{t}]"), color(c1)),
                })
                .collect();
            let upp: Vec<usize> = (1..=k.saturating_sub(2))
                .map(|t| g.u(format!("{name}.u''[{t}]"), color(l)))
                .collect();
            let uppp: Vec<usize> = (1..=k.saturating_sub(2))
                .map(|t| g.u(format!("{name}.u'''[{t}]"), color(c2)))
                .collect();
            let v: Vec<usize> = (0..=k)
                .map(|t| {
                    if t == 0 {
                        usize::MAX
                    } else {
                        g.v(format!("{name}.v[{t}]"), 0)
                    }
                })
                .collect();
            // v'[1] exists only for k = 1 and plays the part of v'[2]
            let first = if k == 1 { 1 } else { 2 };
            let mut vp = vec![usize::MAX; k + 1];
            for t in first..=k {
                vp[t] = g.v(format!("{name}.v'[{t}]"), 0);
            }
            let mut vpp = vec![usize::MAX; k];
            for t in 2..k {
                vpp[t] = g.v(format!("{name}.v''[{t}]"), 0);
            }
            for t in 1..=k {
                g.edge(u[t], hat);
                g.edge(u[t], v[t]);
                g.edge(up[t], v[t]);
                if t >= 2 {
                    g.edge(up[t], vp[t]);
                }
            }
            g.edge(up[1], vp[first]);
            for t in 1..=k.saturating_sub(2) {
                g.edge(upp[t - 1], vp[t + 1]);
                g.edge(upp[t - 1], vpp[t + 1]);
                g.edge(uppp[t - 1], vpp[t + 1]);
                g.edge(uppp[t - 1], vp[t + 2]);
            }
            let internal: Vec<usize> = v[1..]
                .iter()
                .chain(&vp[first..])
                .chain(vpp.iter().skip(2))
                .copied()
                .collect();
            for x in internal {
                g.missing_colors(x, 1);
            }
        }
        for j in 1..=m {
            g.missing_colors(vij[i][j], k);
        }
    }
    g.finish()
}

/// The matching built from a packing given as `bins[i-1]` = bin of item `i`.
pub fn ubp_witness(ubp: &UbpInstance, bins: &[usize]) -> Result<Matching, ReductionError> {
    ubp.check_packing(bins)?;
    let inst = reduce_ubp(ubp);
    let mut w = WitnessBuilder::new(&inst);
    for t in 1..=ubp.b {
        w.pair(&format!("X[{t}]"), "v0");
    }
    for (i, (&k, &bin)) in (1..).zip(ubp.items.iter().zip(bins)) {
        for t in 1..=k {
            w.pair(&format!("X_ij[{i},{bin}].u[{t}]"), "v0");
        }
        let name = h1(i, bin);
        for t in 1..=k {
            w.take_all(&format!("{name}.v[{t}]"));
        }
        for t in 2..k {
            w.take_all(&format!("{name}.v''[{t}]"));
        }
        let mut y = 1;
        for j in (1..=ubp.m).filter(|&j| j != bin) {
            let name = h1(i, j);
            for t in (if k == 1 { 1 } else { 2 })..=k {
                w.take_all(&format!("{name}.v'[{t}]"));
            }
            let target = w.v(&v_item_bin(i, j));
            for &u in inst.v_neighbors(target) {
                if !inst.u_id(u).starts_with("Y[") {
                    w.assign[u] = Some(target);
                }
            }
            for _ in 0..k {
                w.pair(&format!("Y[{i}].u[{y}]"), &v_item_bin(i, j));
                y += 1;
            }
        }
    }
    Ok(w.finish())
}

pub fn check_structure(inst: &Instance) -> StructuralCheck {
    structural_check(inst, |_| false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(UbpInstance::new(vec![1, 1], 2, 1).is_ok());
        assert!(UbpInstance::new(vec![1, 2], 2, 1).is_err());
        assert!(UbpInstance::new(vec![0, 2], 2, 1).is_err());
        let u = UbpInstance::new(vec![2, 1, 1], 2, 2).unwrap();
        assert!(u.check_packing(&[1, 2, 2]).is_ok());
        assert!(u.check_packing(&[1, 1, 2]).is_err());
        assert!(u.check_packing(&[1, 3, 2]).is_err());
        assert!(u.check_packing(&[1, 2]).is_err());
    }

    #[test]
    fn wraparound_stays_in_bins() {
        let u = UbpInstance::new(vec![3], 3, 1).unwrap();
        assert_eq!((1..=3).map(|l| u.wrap(l, 1)).collect::<Vec<_>>(), vec![2, 3, 1]);
        assert_eq!(u.wrap(3, 2), 2);
        let u = UbpInstance::new(vec![1, 1], 2, 1).unwrap();
        assert_eq!((u.wrap_inner(2, 1), u.wrap_inner(2, 2)), (3, 1));
    }
}
