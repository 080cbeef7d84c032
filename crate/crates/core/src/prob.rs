//! Dense probability tensors over named finite alphabets, and Shannon
//! information measures in bits.
//!
//! A [`Joint`] always stores its axes sorted by name, so two joints built
//! through different factor orders compare equal cell by cell. A [`CondPmf`]
//! keeps its axes in the order it was given: rows are indexed by the
//! conditioning assignment (row-major, last conditioning axis fastest) and each
//! row is a distribution over the target assignment (row-major as well).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on total mass at construction.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Negative mutual information down to this magnitude is rounding noise and
/// is clamped to zero.
pub const MI_CLAMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub name: String,
    pub size: usize,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Alphabet {
            name: name.into(),
            size,
        }
    }
}

fn check_axes(axes: &[Alphabet]) -> Result<()> {
    for (i, a) in axes.iter().enumerate() {
        if a.size == 0 {
            return Err(Error::Shape(format!("axis {} has size 0", a.name)));
        }
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::DuplicateAxis(a.name.clone()));
        }
    }
    Ok(())
}

fn cells(axes: &[Alphabet]) -> usize {
    axes.iter().map(|a| a.size).product()
}

fn check_entries(values: &[f64]) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidProbability(format!("entry {i} is {v}")));
        }
    }
    Ok(())
}

/// Visits every multi-index of a row-major tensor with the given axis sizes,
/// passing the flat position and the dot product of the multi-index with
/// `weights`.
fn for_each_index(sizes: &[usize], weights: &[usize], mut f: impl FnMut(usize, usize)) {
    let total: usize = sizes.iter().product();
    let mut counter = vec![0usize; sizes.len()];
    let mut weighted = 0usize;
    for flat in 0..total {
        f(flat, weighted);
        for ax in (0..sizes.len()).rev() {
            counter[ax] += 1;
            weighted += weights[ax];
            if counter[ax] < sizes[ax] {
                break;
            }
            weighted -= weights[ax] * sizes[ax];
            counter[ax] = 0;
        }
    }
}

fn entropy_of(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Binary entropy in bits; 0 and 1 map to 0.
pub fn binary_entropy(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("binary entropy argument {a} outside [0, 1]")));
    }
    Ok(hb(a))
}

/// Unchecked binary entropy for callers that already validated the argument.
pub(crate) fn hb(a: f64) -> f64 {
    if a <= 0.0 || a >= 1.0 {
        0.0
    } else {
        -a * a.log2() - (1.0 - a) * (1.0 - a).log2()
    }
}

/// Joint PMF over named axes, stored row-major with axes sorted by name.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    axes: Vec<Alphabet>,
    probs: Vec<f64>,
}

impl Joint {
    /// Builds a joint from a row-major tensor whose axes are listed in
    /// `axes` order. The result is re-laid out in canonical order.
    pub fn new(axes: Vec<Alphabet>, probs: Vec<f64>) -> Result<Self> {
        check_axes(&axes)?;
        if probs.len() != cells(&axes) {
            return Err(Error::Shape(format!(
                "{} probabilities for {} cells",
                probs.len(),
                cells(&axes)
            )));
        }
        check_entries(&probs)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(format!("total mass {total}")));
        }
        Ok(Joint { axes, probs }.canonical())
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn axis(&self, name: &str) -> Result<&Alphabet> {
        Ok(&self.axes[self.position(name)?])
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::AxisNotFound(name.to_string()))
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let p = self.position(n)?;
            if out.contains(&p) {
                return Err(Error::DuplicateAxis(n.to_string()));
            }
            out.push(p);
        }
        out.sort_unstable();
        Ok(out)
    }

    fn canonical(self) -> Self {
        let mut order: Vec<usize> = (0..self.axes.len()).collect();
        order.sort_by(|&a, &b| self.axes[a].name.cmp(&self.axes[b].name));
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return self;
        }
        let mut src_stride = vec![0usize; self.axes.len()];
        let mut s = 1;
        for ax in (0..self.axes.len()).rev() {
            src_stride[ax] = s;
            s *= self.axes[ax].size;
        }
        let sizes: Vec<usize> = order.iter().map(|&o| self.axes[o].size).collect();
        let weights: Vec<usize> = order.iter().map(|&o| src_stride[o]).collect();
        let mut probs = vec![0.0; self.probs.len()];
        for_each_index(&sizes, &weights, |flat, src| probs[flat] = self.probs[src]);
        let axes = order.iter().map(|&o| self.axes[o].clone()).collect();
        Joint { axes, probs }
    }

    /// Marginal tensor over the axes at `keep` (sorted positions).
    fn marginal_probs(&self, keep: &[usize]) -> Vec<f64> {
        let mut weights = vec![0usize; self.axes.len()];
        let mut s = 1;
        for &k in keep.iter().rev() {
            weights[k] = s;
            s *= self.axes[k].size;
        }
        let sizes: Vec<usize> = self.axes.iter().map(|a| a.size).collect();
        let mut out = vec![0.0; s];
        for_each_index(&sizes, &weights, |flat, t| out[t] += self.probs[flat]);
        out
    }

    fn entropy_at(&self, positions: &[usize]) -> f64 {
        if positions.is_empty() {
            return 0.0;
        }
        if positions.len() == self.axes.len() {
            return entropy_of(&self.probs);
        }
        entropy_of(&self.marginal_probs(positions))
    }

    pub fn marginalize(&self, keep: &[&str]) -> Result<Joint> {
        if keep.is_empty() {
            return Err(Error::Domain("marginalize needs at least one axis".into()));
        }
        let pos = self.positions(keep)?;
        let probs = self.marginal_probs(&pos);
        let axes = pos.iter().map(|&p| self.axes[p].clone()).collect();
        Ok(Joint { axes, probs })
    }

    /// Conditions on a set of axis values; the conditioned axes are removed.
    pub fn condition(&self, on: &[(&str, usize)]) -> Result<Joint> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.axes.len()];
        for &(name, value) in on {
            let p = self.position(name)?;
            if value >= self.axes[p].size {
                return Err(Error::Domain(format!(
                    "value {value} outside axis {name} of size {}",
                    self.axes[p].size
                )));
            }
            if fixed[p].is_some() {
                return Err(Error::DuplicateAxis(name.to_string()));
            }
            fixed[p] = Some(value);
        }
        let free: Vec<usize> = (0..self.axes.len()).filter(|&p| fixed[p].is_none()).collect();
        let mut weights = vec![0usize; self.axes.len()];
        let mut s = 1;
        for &k in free.iter().rev() {
            weights[k] = s;
            s *= self.axes[k].size;
        }
        let sizes: Vec<usize> = self.axes.iter().map(|a| a.size).collect();
        let mut out = vec![0.0; s];
        let mut counter = vec![0usize; self.axes.len()];
        for_each_index(&sizes, &weights, |flat, t| {
            if fixed.iter().zip(&counter).all(|(f, c)| f.is_none_or(|v| v == *c)) {
                out[t] += self.probs[flat];
            }
            for ax in (0..sizes.len()).rev() {
                counter[ax] += 1;
                if counter[ax] < sizes[ax] {
                    break;
                }
                counter[ax] = 0;
            }
        });
        let mass: f64 = out.iter().sum();
        if mass <= 0.0 {
            return Err(Error::ZeroProbabilityEvent);
        }
        out.iter_mut().for_each(|p| *p /= mass);
        let axes = free.iter().map(|&p| self.axes[p].clone()).collect();
        Ok(Joint { axes, probs: out })
    }

    /// Probability of a full assignment (every axis named once).
    pub fn prob(&self, assignment: &[(&str, usize)]) -> Result<f64> {
        if assignment.len() != self.axes.len() {
            return Err(Error::Shape(format!(
                "assignment names {} of {} axes",
                assignment.len(),
                self.axes.len()
            )));
        }
        let mut flat = 0;
        let mut seen = vec![false; self.axes.len()];
        let mut values = vec![0usize; self.axes.len()];
        for &(name, v) in assignment {
            let p = self.position(name)?;
            if seen[p] {
                return Err(Error::DuplicateAxis(name.to_string()));
            }
            if v >= self.axes[p].size {
                return Err(Error::Domain(format!("value {v} outside axis {name}")));
            }
            seen[p] = true;
            values[p] = v;
        }
        for (a, v) in self.axes.iter().zip(values) {
            flat = flat * a.size + v;
        }
        Ok(self.probs[flat])
    }

    /// Renames one axis and restores canonical order.
    pub fn rename(&self, from: &str, to: &str) -> Result<Joint> {
        let p = self.position(from)?;
        if from != to && self.axes.iter().any(|a| a.name == to) {
            return Err(Error::DuplicateAxis(to.to_string()));
        }
        let mut axes = self.axes.clone();
        axes[p].name = to.to_string();
        Ok(Joint {
            axes,
            probs: self.probs.clone(),
        }
        .canonical())
    }

    /// H(targets | given) in bits.
    pub fn entropy(&self, targets: &[&str], given: &[&str]) -> Result<f64> {
        let t = self.positions(targets)?;
        let g = self.positions(given)?;
        if t.iter().any(|p| g.contains(p)) {
            return Err(Error::Domain("targets and given overlap".into()));
        }
        if t.is_empty() {
            return Ok(0.0);
        }
        let mut tg: Vec<usize> = t.iter().chain(&g).copied().collect();
        tg.sort_unstable();
        Ok((self.entropy_at(&tg) - self.entropy_at(&g)).max(0.0))
    }

    /// I(a; b | given) in bits, clamped to zero within [`MI_CLAMP_TOL`].
    pub fn mutual_information(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        let pa = self.positions(a)?;
        let pb = self.positions(b)?;
        let pc = self.positions(given)?;
        let overlap = pa.iter().any(|p| pb.contains(p) || pc.contains(p))
            || pb.iter().any(|p| pc.contains(p));
        if overlap {
            return Err(Error::Domain("mutual information arguments overlap".into()));
        }
        if pa.is_empty() || pb.is_empty() {
            return Ok(0.0);
        }
        let union = |x: &[usize], y: &[usize]| {
            let mut v: Vec<usize> = x.iter().chain(y).copied().collect();
            v.sort_unstable();
            v
        };
        let ac = union(&pa, &pc);
        let bc = union(&pb, &pc);
        let abc = union(&ac, &pb);
        let mi = self.entropy_at(&ac) + self.entropy_at(&bc)
            - self.entropy_at(&abc)
            - self.entropy_at(&pc);
        if mi < 0.0 && mi > -MI_CLAMP_TOL {
            Ok(0.0)
        } else {
            Ok(mi)
        }
    }
}

/// Conditional PMF p(targets | given).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CondPmfData", into = "CondPmfData")]
pub struct CondPmf {
    targets: Vec<Alphabet>,
    given: Vec<Alphabet>,
    kernel: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CondPmfData {
    targets: Vec<Alphabet>,
    given: Vec<Alphabet>,
    kernel: Vec<f64>,
}

impl TryFrom<CondPmfData> for CondPmf {
    type Error = Error;
    fn try_from(d: CondPmfData) -> Result<Self> {
        CondPmf::new(d.targets, d.given, d.kernel)
    }
}

impl From<CondPmf> for CondPmfData {
    fn from(c: CondPmf) -> Self {
        CondPmfData {
            targets: c.targets,
            given: c.given,
            kernel: c.kernel,
        }
    }
}

impl CondPmf {
    pub fn new(targets: Vec<Alphabet>, given: Vec<Alphabet>, kernel: Vec<f64>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::Shape("conditional PMF without target axes".into()));
        }
        let all: Vec<Alphabet> = targets.iter().chain(&given).cloned().collect();
        check_axes(&all)?;
        let row_len = cells(&targets);
        let rows = cells(&given);
        if kernel.len() != rows * row_len {
            return Err(Error::Shape(format!(
                "kernel has {} entries, expected {}",
                kernel.len(),
                rows * row_len
            )));
        }
        check_entries(&kernel)?;
        for r in 0..rows {
            let s: f64 = kernel[r * row_len..(r + 1) * row_len].iter().sum();
            if (s - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::NotNormalized(format!("row {r} sums to {s}")));
            }
        }
        Ok(CondPmf {
            targets,
            given,
            kernel,
        })
    }

    /// Unconditional PMF over a single axis.
    pub fn unconditional(target: Alphabet, probs: Vec<f64>) -> Result<Self> {
        CondPmf::new(vec![target], Vec::new(), probs)
    }

    /// Indicator kernel 1{target = f(given)}; `f` receives the conditioning
    /// values in `given` order.
    pub fn deterministic(
        target: Alphabet,
        given: Vec<Alphabet>,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let rows = cells(&given);
        let sizes: Vec<usize> = given.iter().map(|a| a.size).collect();
        let mut kernel = vec![0.0; rows * target.size];
        let mut values = vec![0usize; given.len()];
        for r in 0..rows {
            let mut rem = r;
            for ax in (0..sizes.len()).rev() {
                values[ax] = rem % sizes[ax];
                rem /= sizes[ax];
            }
            let t = f(&values);
            if t >= target.size {
                return Err(Error::Domain(format!(
                    "deterministic map sends row {r} to {t}, outside axis {} of size {}",
                    target.name, target.size
                )));
            }
            kernel[r * target.size + t] = 1.0;
        }
        CondPmf::new(vec![target], given, kernel)
    }

    /// Uniform rows.
    pub fn uniform(targets: Vec<Alphabet>, given: Vec<Alphabet>) -> Result<Self> {
        let row_len = cells(&targets);
        let rows = cells(&given);
        CondPmf::new(targets, given, vec![1.0 / row_len as f64; rows * row_len])
    }

    pub fn targets(&self) -> &[Alphabet] {
        &self.targets
    }

    pub fn given(&self) -> &[Alphabet] {
        &self.given
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn rows(&self) -> usize {
        cells(&self.given)
    }

    pub fn row_len(&self) -> usize {
        cells(&self.targets)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let l = self.row_len();
        &self.kernel[r * l..(r + 1) * l]
    }

    /// Row index of a conditioning assignment given in `given` order.
    pub fn row_index(&self, given_values: &[usize]) -> usize {
        self.given
            .iter()
            .zip(given_values)
            .fold(0, |acc, (a, &v)| acc * a.size + v)
    }

    pub fn is_deterministic(&self) -> bool {
        self.kernel.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Same kernel, with conditioning-axis names checked against `expected`
    /// (names and sizes, in order).
    pub fn check_signature(&self, targets: &[Alphabet], given: &[Alphabet]) -> Result<()> {
        if self.targets != targets || self.given != given {
            return Err(Error::AlphabetMismatch(format!(
                "expected p({}|{}), found p({}|{})",
                describe(targets),
                describe(given),
                describe(&self.targets),
                describe(&self.given)
            )));
        }
        Ok(())
    }
}

pub(crate) fn describe(axes: &[Alphabet]) -> String {
    axes.iter()
        .map(|a| format!("{}:{}", a.name, a.size))
        .collect::<Vec<_>>()
        .join(",")
}

/// A link in a factor chain.
#[derive(Debug, Clone, Copy)]
pub enum Factor<'a> {
    Joint(&'a Joint),
    Cond(&'a CondPmf),
}

impl<'a> From<&'a Joint> for Factor<'a> {
    fn from(j: &'a Joint) -> Self {
        Factor::Joint(j)
    }
}

impl<'a> From<&'a CondPmf> for Factor<'a> {
    fn from(c: &'a CondPmf) -> Self {
        Factor::Cond(c)
    }
}

/// Multiplies a chain of factors into a joint. Every conditioning axis must
/// be produced by an earlier factor, and no axis may be produced twice.
pub fn compose<'a>(factors: impl IntoIterator<Item = Factor<'a>>) -> Result<Joint> {
    let mut axes: Vec<Alphabet> = Vec::new();
    let mut probs = vec![1.0];
    for factor in factors {
        let (targets, given, kernel): (&[Alphabet], &[Alphabet], &[f64]) = match factor {
            Factor::Joint(j) => (&j.axes, &[], &j.probs),
            Factor::Cond(c) => (&c.targets, &c.given, &c.kernel),
        };
        let mut weights = vec![0usize; axes.len()];
        let mut stride = 1;
        for g in given.iter().rev() {
            let p = axes
                .iter()
                .position(|a| a.name == g.name)
                .ok_or_else(|| Error::DanglingAxis(g.name.clone()))?;
            if axes[p].size != g.size {
                return Err(Error::AxisSize {
                    name: g.name.clone(),
                    expected: axes[p].size,
                    found: g.size,
                });
            }
            weights[p] = stride;
            stride *= g.size;
        }
        for t in targets {
            if axes.iter().any(|a| a.name == t.name) {
                return Err(Error::DuplicateAxis(t.name.clone()));
            }
        }
        let row_len = cells(targets);
        let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
        let mut out = vec![0.0; probs.len() * row_len];
        for_each_index(&sizes, &weights, |flat, row| {
            let p = probs[flat];
            if p == 0.0 {
                return;
            }
            let src = &kernel[row * row_len..(row + 1) * row_len];
            let dst = &mut out[flat * row_len..(flat + 1) * row_len];
            for (d, k) in dst.iter_mut().zip(src) {
                *d = p * k;
            }
        });
        axes.extend(targets.iter().cloned());
        probs = out;
    }
    if axes.is_empty() {
        return Err(Error::Shape("compose needs at least one factor".into()));
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(Joint { axes, probs }.canonical())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit(name: &str) -> Alphabet {
        Alphabet::new(name, 2)
    }

    #[test]
    fn entropy_of_simple_laws() {
        let uniform = Joint::new(vec![bit("X")], vec![0.5, 0.5]).unwrap();
        assert!((uniform.entropy(&["X"], &[]).unwrap() - 1.0).abs() < 1e-15);
        let point = Joint::new(vec![bit("X")], vec![1.0, 0.0]).unwrap();
        assert_eq!(point.entropy(&["X"], &[]).unwrap(), 0.0);
        let skew = Joint::new(vec![bit("X")], vec![0.75, 0.25]).unwrap();
        let expected = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((skew.entropy(&["X"], &[]).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_values_and_domain() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.75).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn mutual_information_of_bsc() {
        let a = 0.25;
        let px = Joint::new(vec![bit("X")], vec![0.5, 0.5]).unwrap();
        let bsc = CondPmf::new(vec![bit("Y")], vec![bit("X")], vec![1.0 - a, a, a, 1.0 - a]).unwrap();
        let j = compose([Factor::from(&px), Factor::from(&bsc)]).unwrap();
        let mi = j.mutual_information(&["X"], &["Y"], &[]).unwrap();
        assert!((mi - (1.0 - hb(0.25))).abs() < 1e-12);
        assert!((mi - 0.188_721_875_540_867_2).abs() < 1e-12);
    }

    #[test]
    fn copy_channel_and_independence() {
        let px = CondPmf::unconditional(bit("X"), vec![0.5, 0.5]).unwrap();
        let copy = CondPmf::deterministic(bit("Y"), vec![bit("X")], |v| v[0]).unwrap();
        let j = compose([Factor::from(&px), Factor::from(&copy)]).unwrap();
        assert!((j.mutual_information(&["X"], &["Y"], &[]).unwrap() - 1.0).abs() < 1e-12);
        let py = CondPmf::unconditional(bit("Y"), vec![0.3, 0.7]).unwrap();
        let ind = compose([Factor::from(&px), Factor::from(&py)]).unwrap();
        assert!(ind.mutual_information(&["X"], &["Y"], &[]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn compose_matches_hand_multiplication() {
        let ps = CondPmf::unconditional(bit("S"), vec![0.5, 0.5]).unwrap();
        let pu = CondPmf::new(vec![bit("U")], vec![bit("S")], vec![0.9, 0.1, 0.2, 0.8]).unwrap();
        let j = compose([Factor::from(&ps), Factor::from(&pu)]).unwrap();
        assert_eq!(j.axes()[0].name, "S");
        let expect = [0.45, 0.05, 0.1, 0.4];
        for (a, b) in j.probs().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_diagonal_and_conditioning() {
        let ps = CondPmf::unconditional(bit("S"), vec![0.4, 0.6]).unwrap();
        let z = CondPmf::deterministic(bit("Z"), vec![bit("S")], |v| v[0]).unwrap();
        let j = compose([Factor::from(&ps), Factor::from(&z)]).unwrap();
        assert_eq!(j.prob(&[("S", 0), ("Z", 1)]).unwrap(), 0.0);
        assert!((j.prob(&[("Z", 1), ("S", 1)]).unwrap() - 0.6).abs() < 1e-15);
        let c = j.condition(&[("S", 0)]).unwrap();
        assert_eq!(c.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn compose_rejects_bad_chains() {
        let pu = CondPmf::new(vec![bit("U")], vec![bit("S")], vec![0.9, 0.1, 0.2, 0.8]).unwrap();
        assert!(matches!(compose([Factor::from(&pu)]), Err(Error::DanglingAxis(_))));
        let ps = CondPmf::unconditional(bit("S"), vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            compose([Factor::from(&ps), Factor::from(&ps)]),
            Err(Error::DuplicateAxis(_))
        ));
    }

    #[test]
    fn single_factor_is_identity() {
        let j = Joint::new(vec![bit("B"), bit("A")], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let again = compose([Factor::from(&j)]).unwrap();
        assert_eq!(j, again);
        // canonical order puts A first: p(A=1,B=0) was listed at B=0,A=1
        assert_eq!(j.axes()[0].name, "A");
        assert_eq!(j.prob(&[("A", 1), ("B", 0)]).unwrap(), 0.2);
    }

    #[test]
    fn marginal_and_condition_of_three_axes() {
        // p(a,b,c) listed row-major over (A,B,C)
        let probs = vec![0.05, 0.10, 0.15, 0.20, 0.05, 0.05, 0.25, 0.15];
        let j = Joint::new(vec![bit("A"), bit("B"), bit("C")], probs).unwrap();
        let ac = j.marginalize(&["C", "A"]).unwrap();
        // p(A=0,C=0)=0.05+0.15, p(A=0,C=1)=0.10+0.20, p(A=1,C=0)=0.05+0.25, p(A=1,C=1)=0.05+0.15
        let expect = [0.20, 0.30, 0.30, 0.20];
        for (a, b) in ac.probs().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let given_b1 = j.condition(&[("B", 1)]).unwrap();
        // p(A,C|B=1) ∝ (0.15, 0.20, 0.25, 0.15) / 0.75
        let expect = [0.2, 0.8 / 3.0, 1.0 / 3.0, 0.2];
        for (a, b) in given_b1.probs().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_probability_condition_is_an_error() {
        let j = Joint::new(vec![bit("X")], vec![1.0, 0.0]).unwrap();
        assert!(matches!(j.condition(&[("X", 1)]), Err(Error::ZeroProbabilityEvent)));
    }

    #[test]
    fn unknown_axis_and_bad_mass() {
        let j = Joint::new(vec![bit("X")], vec![0.5, 0.5]).unwrap();
        assert!(matches!(j.entropy(&["Q"], &[]), Err(Error::AxisNotFound(_))));
        assert!(matches!(
            Joint::new(vec![bit("X")], vec![0.5, 0.6]),
            Err(Error::NotNormalized(_))
        ));
        assert!(CondPmf::new(vec![bit("Y")], vec![bit("X")], vec![0.5, 0.5, 0.2, 0.7]).is_err());
    }

    #[test]
    fn cond_pmf_round_trips_through_json() {
        let c = CondPmf::new(vec![bit("Y")], vec![bit("X")], vec![0.5, 0.5, 0.25, 0.75]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: CondPmf = serde_json::from_str(&s).unwrap();
        assert_eq!(c, back);
        let broken = s.replace("0.75", "0.8");
        assert!(serde_json::from_str::<CondPmf>(&broken).is_err());
    }
}
