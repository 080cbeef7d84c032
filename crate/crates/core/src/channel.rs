//! Channel definitions, decision variables (the factored PMFs being
//! optimized), and assembly of the joint distribution each expression is
//! evaluated on.
//!
//! Kernel layouts are row-major over the conditioning variables in the order
//! they appear in the accessor name: `p_x_given_xr_u_s` has one row per
//! `(x_r, u, s)` with `s` fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{compose, Alphabet, CondPmf, Factor, Joint};

/// Axis names used in every assembled joint.
pub mod axis {
    pub const S: &str = "S";
    pub const U: &str = "U";
    pub const X: &str = "X";
    pub const XR: &str = "X_r";
    pub const Z: &str = "Z";
    pub const Y: &str = "Y";
    pub const S1: &str = "S1";
    pub const S2: &str = "S2";
    pub const X1: &str = "X1";
    pub const X2: &str = "X2";
    pub const X1C: &str = "X1c";
}

fn a(name: &str, size: usize) -> Alphabet {
    Alphabet::new(name, size)
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{name} = {v} is not a probability")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdRcAlphabets {
    pub s: usize,
    pub x: usize,
    pub xr: usize,
    pub z: usize,
    pub y: usize,
}

/// State-dependent relay channel with deterministic relay observation
/// Z = z(X, X_r, S) and output kernel p(y | x, x_r, z, s).
#[derive(Debug, Clone, PartialEq)]
pub struct SdRcSpec {
    sizes: SdRcAlphabets,
    p_s: CondPmf,
    z_table: Vec<usize>,
    z_link: CondPmf,
    kernel: CondPmf,
}

impl SdRcSpec {
    /// `z_table` is indexed `[x][x_r][s]`; `kernel` is `[x][x_r][z][s][y]`.
    pub fn new(
        sizes: SdRcAlphabets,
        p_s: Vec<f64>,
        z_table: Vec<usize>,
        kernel: Vec<f64>,
    ) -> Result<Self> {
        let SdRcAlphabets { s, x, xr, z, y } = sizes;
        let p_s = CondPmf::unconditional(a(axis::S, s), p_s)?;
        if z_table.len() != x * xr * s {
            return Err(Error::Shape(format!(
                "z table has {} entries, expected {}",
                z_table.len(),
                x * xr * s
            )));
        }
        let z_link = CondPmf::deterministic(
            a(axis::Z, z),
            vec![a(axis::X, x), a(axis::XR, xr), a(axis::S, s)],
            |v| z_table[(v[0] * xr + v[1]) * s + v[2]],
        )?;
        let kernel = CondPmf::new(
            vec![a(axis::Y, y)],
            vec![a(axis::X, x), a(axis::XR, xr), a(axis::Z, z), a(axis::S, s)],
            kernel,
        )?;
        Ok(SdRcSpec {
            sizes,
            p_s,
            z_table,
            z_link,
            kernel,
        })
    }

    /// Builds a spec from closures: `z(x, x_r, s)` and `y(x, x_r, z, s)`
    /// returning the output distribution.
    pub fn from_fn(
        sizes: SdRcAlphabets,
        p_s: Vec<f64>,
        z: impl Fn(usize, usize, usize) -> usize,
        y: impl Fn(usize, usize, usize, usize) -> Vec<f64>,
    ) -> Result<Self> {
        let SdRcAlphabets {
            s: ns,
            x: nx,
            xr: nxr,
            z: nz,
            y: ny,
        } = sizes;
        let mut z_table = Vec::with_capacity(nx * nxr * ns);
        for x in 0..nx {
            for r in 0..nxr {
                for s in 0..ns {
                    z_table.push(z(x, r, s));
                }
            }
        }
        let mut kernel = Vec::with_capacity(nx * nxr * nz * ns * ny);
        for x in 0..nx {
            for r in 0..nxr {
                for zz in 0..nz {
                    for s in 0..ns {
                        let row = y(x, r, zz, s);
                        if row.len() != ny {
                            return Err(Error::Shape(format!(
                                "output row ({x},{r},{zz},{s}) has {} entries, expected {ny}",
                                row.len()
                            )));
                        }
                        kernel.extend(row);
                    }
                }
            }
        }
        SdRcSpec::new(sizes, p_s, z_table, kernel)
    }

    pub fn sizes(&self) -> SdRcAlphabets {
        self.sizes
    }

    pub fn p_s(&self) -> &CondPmf {
        &self.p_s
    }

    pub fn kernel(&self) -> &CondPmf {
        &self.kernel
    }

    pub fn z_link(&self) -> &CondPmf {
        &self.z_link
    }

    pub fn z_table(&self) -> &[usize] {
        &self.z_table
    }

    pub fn z(&self, x: usize, xr: usize, s: usize) -> usize {
        self.z_table[(x * self.sizes.xr + xr) * self.sizes.s + s]
    }

    /// p(y | x, x_r, z, s) as a row.
    pub fn output_row(&self, x: usize, xr: usize, z: usize, s: usize) -> &[f64] {
        let SdRcAlphabets { s: ns, xr: nxr, z: nz, .. } = self.sizes;
        self.kernel.row(((x * nxr + xr) * nz + z) * ns + s)
    }

    /// |U| ≤ min{|S||X||X_r|, |S||Y| + 1}.
    pub fn u_cap(&self) -> usize {
        let SdRcAlphabets { s, x, xr, y, .. } = self.sizes;
        (s * x * xr).min(s * y + 1)
    }

    pub fn alphabet(&self, name: &str) -> Alphabet {
        let n = match name {
            axis::S => self.sizes.s,
            axis::X => self.sizes.x,
            axis::XR => self.sizes.xr,
            axis::Z => self.sizes.z,
            axis::Y => self.sizes.y,
            _ => 0,
        };
        a(name, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdRcMode {
    NonCausal,
    Causal,
    NoState,
}

/// The factored input distribution of the relay channel expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SdRcDecision {
    /// p(u|s) p(x_r|u) p(x|x_r,u,s).
    NonCausal {
        p_u_given_s: CondPmf,
        p_xr_given_u: CondPmf,
        p_x_given_xr_u_s: CondPmf,
    },
    /// p(x_r) p(x|x_r,s).
    Causal {
        p_xr: CondPmf,
        p_x_given_xr_s: CondPmf,
    },
    /// p(x_r, x), independent of the state.
    NoState { p_xr_x: CondPmf },
}

impl SdRcDecision {
    pub fn noncausal(
        spec: &SdRcSpec,
        u_size: usize,
        p_u_given_s: Vec<f64>,
        p_xr_given_u: Vec<f64>,
        p_x_given_xr_u_s: Vec<f64>,
    ) -> Result<Self> {
        let [s, u, xr, x] = [
            spec.alphabet(axis::S),
            a(axis::U, u_size),
            spec.alphabet(axis::XR),
            spec.alphabet(axis::X),
        ];
        let d = SdRcDecision::NonCausal {
            p_u_given_s: CondPmf::new(vec![u.clone()], vec![s.clone()], p_u_given_s)?,
            p_xr_given_u: CondPmf::new(vec![xr.clone()], vec![u.clone()], p_xr_given_u)?,
            p_x_given_xr_u_s: CondPmf::new(vec![x], vec![xr, u, s], p_x_given_xr_u_s)?,
        };
        d.validate(spec)?;
        Ok(d)
    }

    pub fn causal(spec: &SdRcSpec, p_xr: Vec<f64>, p_x_given_xr_s: Vec<f64>) -> Result<Self> {
        let d = SdRcDecision::Causal {
            p_xr: CondPmf::unconditional(spec.alphabet(axis::XR), p_xr)?,
            p_x_given_xr_s: CondPmf::new(
                vec![spec.alphabet(axis::X)],
                vec![spec.alphabet(axis::XR), spec.alphabet(axis::S)],
                p_x_given_xr_s,
            )?,
        };
        d.validate(spec)?;
        Ok(d)
    }

    /// `p_xr_x` is indexed `[x_r][x]`.
    pub fn nostate(spec: &SdRcSpec, p_xr_x: Vec<f64>) -> Result<Self> {
        let d = SdRcDecision::NoState {
            p_xr_x: CondPmf::new(
                vec![spec.alphabet(axis::XR), spec.alphabet(axis::X)],
                Vec::new(),
                p_xr_x,
            )?,
        };
        d.validate(spec)?;
        Ok(d)
    }

    pub fn mode(&self) -> SdRcMode {
        match self {
            SdRcDecision::NonCausal { .. } => SdRcMode::NonCausal,
            SdRcDecision::Causal { .. } => SdRcMode::Causal,
            SdRcDecision::NoState { .. } => SdRcMode::NoState,
        }
    }

    pub fn u_size(&self) -> usize {
        match self {
            SdRcDecision::NonCausal { p_u_given_s, .. } => p_u_given_s.targets()[0].size,
            _ => 1,
        }
    }

    /// Factors in their chain order.
    pub fn factors(&self) -> Vec<&CondPmf> {
        match self {
            SdRcDecision::NonCausal {
                p_u_given_s,
                p_xr_given_u,
                p_x_given_xr_u_s,
            } => vec![p_u_given_s, p_xr_given_u, p_x_given_xr_u_s],
            SdRcDecision::Causal {
                p_xr,
                p_x_given_xr_s,
            } => vec![p_xr, p_x_given_xr_s],
            SdRcDecision::NoState { p_xr_x } => vec![p_xr_x],
        }
    }

    /// Rebuilds a decision of the given mode from factors in chain order.
    pub fn from_factors(mode: SdRcMode, mut f: Vec<CondPmf>) -> Result<Self> {
        let want = match mode {
            SdRcMode::NonCausal => 3,
            SdRcMode::Causal => 2,
            SdRcMode::NoState => 1,
        };
        if f.len() != want {
            return Err(Error::ModeMismatch(format!(
                "{mode:?} needs {want} factors, got {}",
                f.len()
            )));
        }
        Ok(match mode {
            SdRcMode::NonCausal => {
                let p_x_given_xr_u_s = f.pop().unwrap();
                let p_xr_given_u = f.pop().unwrap();
                let p_u_given_s = f.pop().unwrap();
                SdRcDecision::NonCausal {
                    p_u_given_s,
                    p_xr_given_u,
                    p_x_given_xr_u_s,
                }
            }
            SdRcMode::Causal => {
                let p_x_given_xr_s = f.pop().unwrap();
                let p_xr = f.pop().unwrap();
                SdRcDecision::Causal {
                    p_xr,
                    p_x_given_xr_s,
                }
            }
            SdRcMode::NoState => SdRcDecision::NoState {
                p_xr_x: f.pop().unwrap(),
            },
        })
    }

    /// Checks every factor's axes against the spec and the |U| cap.
    pub fn validate(&self, spec: &SdRcSpec) -> Result<()> {
        let [s, xr, x] = [
            spec.alphabet(axis::S),
            spec.alphabet(axis::XR),
            spec.alphabet(axis::X),
        ];
        match self {
            SdRcDecision::NonCausal {
                p_u_given_s,
                p_xr_given_u,
                p_x_given_xr_u_s,
            } => {
                let u = a(axis::U, self.u_size());
                p_u_given_s.check_signature(&[u.clone()], &[s.clone()])?;
                p_xr_given_u.check_signature(&[xr.clone()], &[u.clone()])?;
                p_x_given_xr_u_s.check_signature(&[x], &[xr, u, s])?;
                if u_exceeds(self.u_size(), spec.u_cap()) {
                    return Err(Error::Cardinality {
                        u: self.u_size(),
                        cap: spec.u_cap(),
                    });
                }
            }
            SdRcDecision::Causal {
                p_xr,
                p_x_given_xr_s,
            } => {
                p_xr.check_signature(&[xr.clone()], &[])?;
                p_x_given_xr_s.check_signature(&[x], &[xr, s])?;
            }
            SdRcDecision::NoState { p_xr_x } => p_xr_x.check_signature(&[xr, x], &[])?,
        }
        Ok(())
    }
}

fn u_exceeds(u: usize, cap: usize) -> bool {
    u == 0 || u > cap
}

/// Joint over (S, U, X_r, X, Z, Y). Causal decisions get a singleton U;
/// state-blind decisions use U = X_r.
pub fn assemble_sdrc(spec: &SdRcSpec, d: &SdRcDecision) -> Result<Joint> {
    d.validate(spec)?;
    match d {
        SdRcDecision::NonCausal {
            p_u_given_s,
            p_xr_given_u,
            p_x_given_xr_u_s,
        } => compose([
            Factor::from(spec.p_s()),
            p_u_given_s.into(),
            p_xr_given_u.into(),
            p_x_given_xr_u_s.into(),
            spec.z_link().into(),
            spec.kernel().into(),
        ]),
        SdRcDecision::Causal {
            p_xr,
            p_x_given_xr_s,
        } => {
            let u = CondPmf::unconditional(a(axis::U, 1), vec![1.0])?;
            compose([
                Factor::from(spec.p_s()),
                (&u).into(),
                p_xr.into(),
                p_x_given_xr_s.into(),
                spec.z_link().into(),
                spec.kernel().into(),
            ])
        }
        SdRcDecision::NoState { p_xr_x } => {
            let xr = spec.alphabet(axis::XR);
            let u = CondPmf::deterministic(a(axis::U, xr.size), vec![xr], |v| v[0])?;
            compose([
                Factor::from(spec.p_s()),
                p_xr_x.into(),
                (&u).into(),
                spec.z_link().into(),
                spec.kernel().into(),
            ])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacAlphabets {
    pub s1: usize,
    pub s2: usize,
    pub x1: usize,
    pub x2: usize,
    pub z: usize,
    pub y: usize,
}

/// Two-encoder MAC where encoder 2 cribs Z = z(X1, S1); S1 is known to
/// encoder 1, S2 to encoder 2, both to the decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct MacSpec {
    sizes: MacAlphabets,
    p_state: CondPmf,
    z_table: Vec<usize>,
    z_link: CondPmf,
    kernel: CondPmf,
}

impl MacSpec {
    /// `p_state` is `[s1][s2]`, `z_table` is `[x1][s1]`, `kernel` is
    /// `[x1][x2][s1][s2][y]`.
    pub fn new(
        sizes: MacAlphabets,
        p_state: Vec<f64>,
        z_table: Vec<usize>,
        kernel: Vec<f64>,
    ) -> Result<Self> {
        let MacAlphabets { s1, s2, x1, x2, z, y } = sizes;
        let p_state =
            CondPmf::new(vec![a(axis::S1, s1), a(axis::S2, s2)], Vec::new(), p_state)?;
        if z_table.len() != x1 * s1 {
            return Err(Error::Shape(format!(
                "z table has {} entries, expected {}",
                z_table.len(),
                x1 * s1
            )));
        }
        let z_link = CondPmf::deterministic(
            a(axis::Z, z),
            vec![a(axis::X1, x1), a(axis::S1, s1)],
            |v| z_table[v[0] * s1 + v[1]],
        )?;
        let kernel = CondPmf::new(
            vec![a(axis::Y, y)],
            vec![
                a(axis::X1, x1),
                a(axis::X2, x2),
                a(axis::S1, s1),
                a(axis::S2, s2),
            ],
            kernel,
        )?;
        Ok(MacSpec {
            sizes,
            p_state,
            z_table,
            z_link,
            kernel,
        })
    }

    /// Closure form: `z(x1, s1)` and `y(x1, x2, s1, s2)`.
    pub fn from_fn(
        sizes: MacAlphabets,
        p_state: Vec<f64>,
        z: impl Fn(usize, usize) -> usize,
        y: impl Fn(usize, usize, usize, usize) -> Vec<f64>,
    ) -> Result<Self> {
        let MacAlphabets { s1, s2, x1, x2, y: ny, .. } = sizes;
        let mut z_table = Vec::with_capacity(x1 * s1);
        for a1 in 0..x1 {
            for b1 in 0..s1 {
                z_table.push(z(a1, b1));
            }
        }
        let mut kernel = Vec::new();
        for a1 in 0..x1 {
            for a2 in 0..x2 {
                for b1 in 0..s1 {
                    for b2 in 0..s2 {
                        let row = y(a1, a2, b1, b2);
                        if row.len() != ny {
                            return Err(Error::Shape(format!(
                                "output row ({a1},{a2},{b1},{b2}) has {} entries, expected {ny}",
                                row.len()
                            )));
                        }
                        kernel.extend(row);
                    }
                }
            }
        }
        MacSpec::new(sizes, p_state, z_table, kernel)
    }

    /// Conferencing MAC: X1 = (X1c, X1p) with index `x1c * x1p + x1p_value`,
    /// Z = X1p, S2 singleton, and an output kernel `[x1c][x2][s][y]` that
    /// ignores X1p.
    pub fn conferencing(
        p_s: Vec<f64>,
        x1c: usize,
        x1p: usize,
        x2: usize,
        y: usize,
        kernel_c: Vec<f64>,
    ) -> Result<Self> {
        let s = p_s.len();
        if kernel_c.len() != x1c * x2 * s * y {
            return Err(Error::Shape(format!(
                "conferencing kernel has {} entries, expected {}",
                kernel_c.len(),
                x1c * x2 * s * y
            )));
        }
        let sizes = MacAlphabets {
            s1: s,
            s2: 1,
            x1: x1c * x1p,
            x2,
            z: x1p,
            y,
        };
        MacSpec::from_fn(
            sizes,
            p_s,
            |a1, _| a1 % x1p,
            |a1, a2, b1, _| {
                let c = a1 / x1p;
                let base = ((c * x2 + a2) * s + b1) * y;
                kernel_c[base..base + y].to_vec()
            },
        )
    }

    pub fn sizes(&self) -> MacAlphabets {
        self.sizes
    }

    pub fn p_state(&self) -> &CondPmf {
        &self.p_state
    }

    pub fn z_link(&self) -> &CondPmf {
        &self.z_link
    }

    pub fn kernel(&self) -> &CondPmf {
        &self.kernel
    }

    pub fn z_table(&self) -> &[usize] {
        &self.z_table
    }

    pub fn z(&self, x1: usize, s1: usize) -> usize {
        self.z_table[x1 * self.sizes.s1 + s1]
    }

    /// |U| ≤ min{|S2||S1||X1||X2| + 2, |S1||S2||Y| + 3}; reused for causal
    /// cribbing.
    pub fn u_cap(&self) -> usize {
        let MacAlphabets { s1, s2, x1, x2, y, .. } = self.sizes;
        (s2 * s1 * x1 * x2 + 2).min(s1 * s2 * y + 3)
    }

    pub fn alphabet(&self, name: &str) -> Alphabet {
        let n = match name {
            axis::S1 => self.sizes.s1,
            axis::S2 => self.sizes.s2,
            axis::X1 => self.sizes.x1,
            axis::X2 => self.sizes.x2,
            axis::Z => self.sizes.z,
            axis::Y => self.sizes.y,
            _ => 0,
        };
        a(name, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cribbing {
    StrictlyCausal,
    Causal,
}

/// p(u, x1 | s1) together with p(x2 | u, s2) (strictly causal) or
/// p(x2 | z, u, s2) (causal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacDecision {
    pub cribbing: Cribbing,
    pub p_u_x1_given_s1: CondPmf,
    pub p_x2: CondPmf,
}

impl MacDecision {
    /// `p_u_x1_given_s1` rows are `s1`, columns `(u, x1)`;
    /// `p_x2_given_u_s2` rows are `(u, s2)`.
    pub fn strictly_causal(
        spec: &MacSpec,
        u_size: usize,
        p_u_x1_given_s1: Vec<f64>,
        p_x2_given_u_s2: Vec<f64>,
    ) -> Result<Self> {
        let u = a(axis::U, u_size);
        let d = MacDecision {
            cribbing: Cribbing::StrictlyCausal,
            p_u_x1_given_s1: CondPmf::new(
                vec![u.clone(), spec.alphabet(axis::X1)],
                vec![spec.alphabet(axis::S1)],
                p_u_x1_given_s1,
            )?,
            p_x2: CondPmf::new(
                vec![spec.alphabet(axis::X2)],
                vec![u, spec.alphabet(axis::S2)],
                p_x2_given_u_s2,
            )?,
        };
        d.validate(spec)?;
        Ok(d)
    }

    /// As [`MacDecision::strictly_causal`] with rows `(z, u, s2)` for X2.
    pub fn causal(
        spec: &MacSpec,
        u_size: usize,
        p_u_x1_given_s1: Vec<f64>,
        p_x2_given_z_u_s2: Vec<f64>,
    ) -> Result<Self> {
        let u = a(axis::U, u_size);
        let d = MacDecision {
            cribbing: Cribbing::Causal,
            p_u_x1_given_s1: CondPmf::new(
                vec![u.clone(), spec.alphabet(axis::X1)],
                vec![spec.alphabet(axis::S1)],
                p_u_x1_given_s1,
            )?,
            p_x2: CondPmf::new(
                vec![spec.alphabet(axis::X2)],
                vec![spec.alphabet(axis::Z), u, spec.alphabet(axis::S2)],
                p_x2_given_z_u_s2,
            )?,
        };
        d.validate(spec)?;
        Ok(d)
    }

    pub fn u_size(&self) -> usize {
        self.p_u_x1_given_s1.targets()[0].size
    }

    pub fn validate(&self, spec: &MacSpec) -> Result<()> {
        let u = a(axis::U, self.u_size());
        self.p_u_x1_given_s1.check_signature(
            &[u.clone(), spec.alphabet(axis::X1)],
            &[spec.alphabet(axis::S1)],
        )?;
        let x2 = [spec.alphabet(axis::X2)];
        let strict = [u.clone(), spec.alphabet(axis::S2)];
        let causal = [spec.alphabet(axis::Z), u, spec.alphabet(axis::S2)];
        let ok = match self.cribbing {
            Cribbing::StrictlyCausal => self.p_x2.check_signature(&x2, &strict),
            Cribbing::Causal => self.p_x2.check_signature(&x2, &causal),
        };
        if ok.is_err() {
            return Err(Error::ModeMismatch(format!(
                "{:?} cribbing needs p(X2|{}), found p(X2|{})",
                self.cribbing,
                match self.cribbing {
                    Cribbing::StrictlyCausal => "U,S2",
                    Cribbing::Causal => "Z,U,S2",
                },
                crate::prob::describe(self.p_x2.given())
            )));
        }
        if u_exceeds(self.u_size(), spec.u_cap()) {
            return Err(Error::Cardinality {
                u: self.u_size(),
                cap: spec.u_cap(),
            });
        }
        Ok(())
    }
}

/// Joint over (S1, S2, U, X1, X2, Z, Y).
pub fn assemble_mac(spec: &MacSpec, d: &MacDecision) -> Result<Joint> {
    d.validate(spec)?;
    compose([
        Factor::from(spec.p_state()),
        (&d.p_u_x1_given_s1).into(),
        spec.z_link().into(),
        (&d.p_x2).into(),
        spec.kernel().into(),
    ])
}

/// Joint over (S, U, X1, X2, Z, Y) for a spec whose S2 is a singleton, built
/// from the one-state chain p(s) p(u|s) p(x1|s,u) 1{z = z(x1,s)} p(x2|u[,z])
/// p(y|x1,x2,s).
pub fn assemble_mac_one_state(spec: &MacSpec, d: &MacDecision) -> Result<Joint> {
    d.validate(spec)?;
    let MacAlphabets { s1, s2, x1, x2, z, y } = spec.sizes();
    if s2 != 1 {
        return Err(Error::Domain(format!("one-state assembly needs |S2| = 1, found {s2}")));
    }
    let nu = d.u_size();
    let [sa, ua, x1a, x2a, za, ya] = [
        a(axis::S, s1),
        a(axis::U, nu),
        a(axis::X1, x1),
        a(axis::X2, x2),
        a(axis::Z, z),
        a(axis::Y, y),
    ];
    let p_s = CondPmf::unconditional(sa.clone(), spec.p_state().kernel().to_vec())?;
    let mut p_u = Vec::with_capacity(s1 * nu);
    let mut p_x1 = Vec::with_capacity(s1 * nu * x1);
    for s in 0..s1 {
        let row = d.p_u_x1_given_s1.row(s);
        let marg: Vec<f64> = (0..nu).map(|u| row[u * x1..(u + 1) * x1].iter().sum()).collect();
        p_u.extend(&marg);
        for (u, &m) in marg.iter().enumerate() {
            if m > 0.0 {
                p_x1.extend(row[u * x1..(u + 1) * x1].iter().map(|v| v / m));
            } else {
                p_x1.extend(std::iter::repeat_n(1.0 / x1 as f64, x1));
            }
        }
    }
    let p_u = CondPmf::new(vec![ua.clone()], vec![sa.clone()], renorm_rows(p_u, nu))?;
    let p_x1 = CondPmf::new(
        vec![x1a.clone()],
        vec![sa.clone(), ua.clone()],
        renorm_rows(p_x1, x1),
    )?;
    let z_link = CondPmf::deterministic(za.clone(), vec![x1a.clone(), sa.clone()], |v| {
        spec.z(v[0], v[1])
    })?;
    // S2 is a singleton, so p(x2|.., s2=0) is the kernel itself.
    let x2_given = match d.cribbing {
        Cribbing::StrictlyCausal => vec![ua.clone()],
        Cribbing::Causal => vec![za.clone(), ua.clone()],
    };
    let p_x2 = CondPmf::new(vec![x2a.clone()], x2_given, d.p_x2.kernel().to_vec())?;
    let mut kernel = Vec::with_capacity(x1 * x2 * s1 * y);
    for r in 0..x1 * x2 * s1 {
        kernel.extend(spec.kernel().row(r));
    }
    let kernel = CondPmf::new(vec![ya], vec![x1a, x2a, sa], kernel)?;
    compose([
        Factor::from(&p_s),
        (&p_u).into(),
        (&p_x1).into(),
        (&z_link).into(),
        (&p_x2).into(),
        (&kernel).into(),
    ])
}

/// Divides each row by its sum to remove accumulated rounding.
fn renorm_rows(mut v: Vec<f64>, row_len: usize) -> Vec<f64> {
    for row in v.chunks_mut(row_len) {
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|p| *p /= s);
        }
    }
    v
}

/// Point-to-point channel p(y | x2, s) whose encoder learns the state only
/// through a state encoder sending X1 (rate budget log2 |X1|).
#[derive(Debug, Clone, PartialEq)]
pub struct PtpSeSpec {
    p_s: CondPmf,
    kernel: CondPmf,
    x1: usize,
}

impl PtpSeSpec {
    /// `kernel` is `[x2][s][y]`.
    pub fn new(p_s: Vec<f64>, x1: usize, x2: usize, y: usize, kernel: Vec<f64>) -> Result<Self> {
        if x1 == 0 {
            return Err(Error::Shape("state-encoder alphabet is empty".into()));
        }
        let s = p_s.len();
        let p_s = CondPmf::unconditional(a(axis::S, s), p_s)?;
        let kernel = CondPmf::new(
            vec![a(axis::Y, y)],
            vec![a(axis::X2, x2), a(axis::S, s)],
            kernel,
        )?;
        Ok(PtpSeSpec { p_s, kernel, x1 })
    }

    pub fn p_s(&self) -> &CondPmf {
        &self.p_s
    }

    pub fn kernel(&self) -> &CondPmf {
        &self.kernel
    }

    pub fn s_size(&self) -> usize {
        self.p_s.targets()[0].size
    }

    pub fn x1_size(&self) -> usize {
        self.x1
    }

    pub fn x2_size(&self) -> usize {
        self.kernel.given()[0].size
    }

    pub fn y_size(&self) -> usize {
        self.kernel.targets()[0].size
    }

    /// Rate budget of the state encoder, log2 |X1|.
    pub fn budget(&self) -> f64 {
        (self.x1 as f64).log2()
    }

    /// |U| ≤ |S||X2| + 1.
    pub fn u_cap(&self) -> usize {
        self.s_size() * self.x2_size() + 1
    }

    pub fn alphabet(&self, name: &str) -> Alphabet {
        let n = match name {
            axis::S => self.s_size(),
            axis::X1 => self.x1,
            axis::X2 => self.x2_size(),
            axis::Y => self.y_size(),
            _ => 0,
        };
        a(name, n)
    }
}

/// p(u|s) and p(x2|u) for the state-encoder channel with non-causal CSI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtpSeDecision {
    pub p_u_given_s: CondPmf,
    pub p_x2_given_u: CondPmf,
}

impl PtpSeDecision {
    pub fn new(
        spec: &PtpSeSpec,
        u_size: usize,
        p_u_given_s: Vec<f64>,
        p_x2_given_u: Vec<f64>,
    ) -> Result<Self> {
        let u = a(axis::U, u_size);
        let d = PtpSeDecision {
            p_u_given_s: CondPmf::new(vec![u.clone()], vec![spec.alphabet(axis::S)], p_u_given_s)?,
            p_x2_given_u: CondPmf::new(vec![spec.alphabet(axis::X2)], vec![u], p_x2_given_u)?,
        };
        d.validate(spec)?;
        Ok(d)
    }

    pub fn u_size(&self) -> usize {
        self.p_u_given_s.targets()[0].size
    }

    pub fn validate(&self, spec: &PtpSeSpec) -> Result<()> {
        let u = a(axis::U, self.u_size());
        self.p_u_given_s
            .check_signature(&[u.clone()], &[spec.alphabet(axis::S)])?;
        self.p_x2_given_u
            .check_signature(&[spec.alphabet(axis::X2)], &[u])?;
        if u_exceeds(self.u_size(), spec.u_cap()) {
            return Err(Error::Cardinality {
                u: self.u_size(),
                cap: spec.u_cap(),
            });
        }
        Ok(())
    }
}

/// Joint over (S, U, X2, Y).
pub fn assemble_ptp_se(spec: &PtpSeSpec, d: &PtpSeDecision) -> Result<Joint> {
    d.validate(spec)?;
    compose([
        Factor::from(spec.p_s()),
        (&d.p_u_given_s).into(),
        (&d.p_x2_given_u).into(),
        spec.kernel().into(),
    ])
}

/// Ternary-state example: p_S = (p/2, p/2, 1-p); state 0 is a Z-channel
/// (input 1 flips to 0 with probability `alpha`), state 1 the mirrored
/// S-channel, state 2 noiseless. Binary X1, X2, Y.
pub fn example_channel(alpha: f64, p: f64) -> Result<PtpSeSpec> {
    check_prob("alpha", alpha)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
    }
    let mut kernel = Vec::with_capacity(12);
    for x2 in 0..2 {
        for s in 0..3 {
            let row = match (s, x2) {
                (0, 0) => [1.0, 0.0],
                (0, _) => [alpha, 1.0 - alpha],
                (1, 0) => [1.0 - alpha, alpha],
                (1, _) => [0.0, 1.0],
                (_, 0) => [1.0, 0.0],
                _ => [0.0, 1.0],
            };
            kernel.extend(row);
        }
    }
    PtpSeSpec::new(vec![p / 2.0, p / 2.0, 1.0 - p], 2, 2, 2, kernel)
}

/// Embeds the state-encoder channel as a cribbing MAC: Z = X1 (the private
/// link), an output kernel that ignores X1, and a singleton S2.
pub fn ptp_se_as_mac(spec: &PtpSeSpec) -> Result<MacSpec> {
    let sizes = MacAlphabets {
        s1: spec.s_size(),
        s2: 1,
        x1: spec.x1_size(),
        x2: spec.x2_size(),
        z: spec.x1_size(),
        y: spec.y_size(),
    };
    let ns = spec.s_size();
    MacSpec::from_fn(
        sizes,
        spec.p_s().kernel().to_vec(),
        |x1, _| x1,
        |_, x2, s1, _| spec.kernel().row(x2 * ns + s1).to_vec(),
    )
}

/// Decision for the conferencing MAC: p(u, x1c | s) and p(x2 | u). The
/// private part X1p is drawn uniformly given (u, s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConferencingDecision {
    pub p_u_x1c_given_s: CondPmf,
    pub p_x2_given_u: CondPmf,
}

impl ConferencingDecision {
    /// `p_u_x1c_given_s` rows are `s`, columns `(u, x1c)`.
    pub fn new(
        s: usize,
        u_size: usize,
        x1c: usize,
        x2: usize,
        p_u_x1c_given_s: Vec<f64>,
        p_x2_given_u: Vec<f64>,
    ) -> Result<Self> {
        let u = a(axis::U, u_size);
        Ok(ConferencingDecision {
            p_u_x1c_given_s: CondPmf::new(
                vec![u.clone(), a(axis::X1C, x1c)],
                vec![a(axis::S1, s)],
                p_u_x1c_given_s,
            )?,
            p_x2_given_u: CondPmf::new(vec![a(axis::X2, x2)], vec![u], p_x2_given_u)?,
        })
    }

    pub fn u_size(&self) -> usize {
        self.p_u_x1c_given_s.targets()[0].size
    }

    pub fn x1c_size(&self) -> usize {
        self.p_u_x1c_given_s.targets()[1].size
    }

    /// The equivalent cribbing-MAC decision with p(x1p | u, s) uniform.
    pub fn to_mac_decision(&self, spec: &MacSpec, x1p: usize) -> Result<MacDecision> {
        let MacAlphabets { s1, x1, .. } = spec.sizes();
        let (nu, nc) = (self.u_size(), self.x1c_size());
        if nc * x1p != x1 {
            return Err(Error::AlphabetMismatch(format!(
                "|X1c| * |X1p| = {} but |X1| = {x1}",
                nc * x1p
            )));
        }
        let mut p = Vec::with_capacity(s1 * nu * x1);
        for s in 0..s1 {
            let row = self.p_u_x1c_given_s.row(s);
            for u in 0..nu {
                for c in 0..nc {
                    let v = row[u * nc + c] / x1p as f64;
                    p.extend(std::iter::repeat_n(v, x1p));
                }
            }
        }
        let p = renorm_rows(p, nu * x1);
        let mut p2 = Vec::new();
        for u in 0..nu {
            p2.extend(self.p_x2_given_u.row(u));
        }
        MacDecision::strictly_causal(spec, nu, p, p2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_sdrc() -> SdRcSpec {
        let sizes = SdRcAlphabets {
            s: 2,
            x: 2,
            xr: 2,
            z: 2,
            y: 2,
        };
        // Z = X xor S; Y = X with a flip when X_r != S.
        SdRcSpec::from_fn(
            sizes,
            vec![0.3, 0.7],
            |x, _, s| x ^ s,
            |x, r, _, s| {
                let e = if r == s { 0.0 } else { 0.2 };
                if x == 0 {
                    vec![1.0 - e, e]
                } else {
                    vec![e, 1.0 - e]
                }
            },
        )
        .unwrap()
    }

    #[test]
    fn example_channel_structure() {
        let spec = example_channel(0.0, 0.2).unwrap();
        assert_eq!(spec.p_s().kernel(), &[0.1, 0.1, 0.8]);
        for x2 in 0..2 {
            for s in 0..3 {
                let row = spec.kernel().row(x2 * 3 + s);
                assert_eq!(row[x2], 1.0);
            }
        }
        let stuck = example_channel(1.0, 0.2).unwrap();
        for x2 in 0..2 {
            assert_eq!(stuck.kernel().row(x2 * 3)[0], 1.0);
            assert_eq!(stuck.kernel().row(x2 * 3 + 1)[1], 1.0);
        }
        let half = example_channel(0.5, 0.2).unwrap();
        assert_eq!(half.kernel().row(3), &[0.5, 0.5]); // x2=1, s=0
        assert_eq!(half.kernel().row(1), &[0.5, 0.5]); // x2=0, s=1
        assert!(example_channel(1.2, 0.2).is_err());
        assert!(example_channel(0.5, 0.0).is_err());
    }

    #[test]
    fn sdrc_assembly_matches_hand_multiplication() {
        let spec = toy_sdrc();
        let d = SdRcDecision::noncausal(
            &spec,
            2,
            vec![0.6, 0.4, 0.1, 0.9],
            vec![0.8, 0.2, 0.3, 0.7],
            vec![
                0.5, 0.5, 0.2, 0.8, 0.9, 0.1, 0.4, 0.6, // x_r = 0, (u, s)
                0.7, 0.3, 0.1, 0.9, 0.6, 0.4, 0.3, 0.7, // x_r = 1
            ],
        )
        .unwrap();
        let j = assemble_sdrc(&spec, &d).unwrap();
        assert!((j.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // p(s=1,u=0,xr=1,x=1,z=0,y=1) = 0.7*0.1*0.2*p(x=1|xr=1,u=0,s=1)*(1-0.2)
        // p(x=1|xr=1,u=0,s=1) = 0.9 (row index 1*4 + 0*2 + 1)
        let cell = |s, u, r, x, z, y| {
            j.prob(&[("S", s), ("U", u), ("X_r", r), ("X", x), ("Z", z), ("Y", y)])
                .unwrap()
        };
        assert!((cell(1, 0, 1, 1, 0, 1) - 0.7 * 0.1 * 0.2 * 0.9 * 1.0).abs() < 1e-15);
        // z must equal x xor s
        assert_eq!(cell(1, 0, 1, 1, 1, 1), 0.0);
        // p(s=0,u=1,xr=0,x=0,z=0,y=1): 0.3*0.4*0.3*p(x=0|0,1,0)=0.9 * flip 0 → 0
        assert_eq!(cell(0, 1, 0, 0, 0, 1), 0.0);
        // p(s=0,u=1,xr=1,x=0,z=0,y=1): 0.3*0.4*0.7*p(x=0|1,1,0)=0.6 * flip 0.2
        assert!((cell(0, 1, 1, 0, 0, 1) - 0.3 * 0.4 * 0.7 * 0.6 * 0.2).abs() < 1e-15);
        let ps = j.marginalize(&["S"]).unwrap();
        assert!((ps.probs()[0] - 0.3).abs() < 1e-15 && (ps.probs()[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn causal_assembly_equals_singleton_noncausal() {
        let spec = toy_sdrc();
        let p_xr = vec![0.35, 0.65];
        let p_x = vec![0.2, 0.8, 0.5, 0.5, 0.9, 0.1, 0.4, 0.6];
        let causal = SdRcDecision::causal(&spec, p_xr.clone(), p_x.clone()).unwrap();
        let nc = SdRcDecision::noncausal(&spec, 1, vec![1.0, 1.0], p_xr, p_x).unwrap();
        let j1 = assemble_sdrc(&spec, &causal).unwrap();
        let j2 = assemble_sdrc(&spec, &nc).unwrap();
        for (a, b) in j1.probs().iter().zip(j2.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cardinality_and_signature_checks() {
        let spec = toy_sdrc();
        assert_eq!(spec.u_cap(), 5);
        let too_big = SdRcDecision::noncausal(
            &spec,
            6,
            vec![1.0 / 6.0; 12],
            vec![0.5; 12],
            vec![0.5; 2 * 2 * 6 * 2],
        );
        assert!(matches!(too_big, Err(Error::Cardinality { .. })));
        let mac = ptp_se_as_mac(&example_channel(0.5, 0.2).unwrap()).unwrap();
        let wrong = MacDecision {
            cribbing: Cribbing::StrictlyCausal,
            p_u_x1_given_s1: CondPmf::uniform(
                vec![Alphabet::new("U", 2), mac.alphabet(axis::X1)],
                vec![mac.alphabet(axis::S1)],
            )
            .unwrap(),
            p_x2: CondPmf::uniform(
                vec![mac.alphabet(axis::X2)],
                vec![mac.alphabet(axis::Z), Alphabet::new("U", 2), mac.alphabet(axis::S2)],
            )
            .unwrap(),
        };
        assert!(matches!(wrong.validate(&mac), Err(Error::ModeMismatch(_))));
    }

    #[test]
    fn ptp_embedding_structure() {
        let spec = example_channel(0.5, 0.2).unwrap();
        let mac = ptp_se_as_mac(&spec).unwrap();
        for x1 in 0..2 {
            for s in 0..3 {
                assert_eq!(mac.z(x1, s), x1);
            }
        }
        for x1 in 0..2 {
            for x2 in 0..2 {
                for s in 0..3 {
                    let row = mac.kernel().row(((x1 * 2 + x2) * 3 + s) * 1);
                    assert_eq!(row, spec.kernel().row(x2 * 3 + s));
                }
            }
        }
    }

    #[test]
    fn mac_assembly_hand_cells() {
        // 2-ary everything, Z = X1 and S1, S2 independent uniform-ish.
        let sizes = MacAlphabets {
            s1: 2,
            s2: 2,
            x1: 2,
            x2: 2,
            z: 2,
            y: 2,
        };
        let spec = MacSpec::from_fn(
            sizes,
            vec![0.2, 0.3, 0.1, 0.4],
            |x1, s1| x1 & s1,
            |x1, x2, s1, s2| {
                let v = (x1 ^ x2 ^ s1 ^ s2) as f64;
                vec![0.9 - 0.8 * v, 0.1 + 0.8 * v]
            },
        )
        .unwrap();
        let d = MacDecision::causal(
            &spec,
            2,
            vec![0.1, 0.2, 0.3, 0.4, 0.25, 0.25, 0.4, 0.1],
            vec![
                0.5, 0.5, 0.6, 0.4, 0.7, 0.3, 0.8, 0.2, // z = 0, (u, s2)
                0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.4, 0.6, // z = 1
            ],
        )
        .unwrap();
        let j = assemble_mac(&spec, &d).unwrap();
        let cell = |s1, s2, u, x1, x2, y| {
            let z = x1 & s1;
            j.prob(&[
                ("S1", s1),
                ("S2", s2),
                ("U", u),
                ("X1", x1),
                ("X2", x2),
                ("Z", z),
                ("Y", y),
            ])
            .unwrap()
        };
        // s1=1,s2=0 (0.1); (u=1,x1=1|s1=1)=0.1; z=1; p(x2=0|z=1,u=1,s2=0)=0.3;
        // x1^x2^s1^s2 = 1^0^1^0 = 0 → p(y=0)=0.9
        assert!((cell(1, 0, 1, 1, 0, 0) - 0.1 * 0.1 * 0.3 * 0.9).abs() < 1e-15);
        // s1=0,s2=1 (0.3); (u=0,x1=1|s1=0)=0.2; z=0; p(x2=1|z=0,u=0,s2=1)=0.4;
        // parity 1^1^0^1 = 1 → p(y=1)=0.9
        assert!((cell(0, 1, 0, 1, 1, 1) - 0.3 * 0.2 * 0.4 * 0.9).abs() < 1e-15);
        // s1=1,s2=1 (0.4); (u=0,x1=0|s1=1)=0.25; z=0; p(x2=1|z=0,u=0,s2=1)=0.4;
        // parity 0^1^1^1 = 1 → p(y=0)=0.1
        assert!((cell(1, 1, 0, 0, 1, 0) - 0.4 * 0.25 * 0.4 * 0.1).abs() < 1e-15);
    }
}
