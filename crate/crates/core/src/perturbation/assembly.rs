use num_complex::Complex64;
use serde::Serialize;

use super::MetricJet;
use crate::error::{Error, Result};
use crate::hardy::{
    ladder_d, ladder_dstar, mult_monomial, mult_monomial_adj, mult_w, mult_wstar, BasisSpec,
    MonomialOperator, OperatorSum,
};
use crate::model_curvature::{connection01_operator, connection10_operator, CoefficientMutation};
use crate::multiindex::{sup_norm, MultiIndex};

type Blocks = Vec<Vec<OperatorSum>>;

fn check_dims(jet: &MetricJet, spec: &BasisSpec) -> Result<()> {
    jet.validate()?;
    if jet.n != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, got: jet.n });
    }
    Ok(())
}

/// `coef s_mu^{-1} (eps^{-1} W^mu D_m + mu_m W^{mu - c_m})`, the operator of
/// `u -> d/dw_m (coef g_mu u)` in the frame.
fn divergence_term(coef: Complex64, m: usize, mu: &MultiIndex, spec: &BasisSpec) -> OperatorSum {
    let scale = coef / sup_norm(mu);
    let mut out = OperatorSum::from(mult_monomial(mu, spec).compose(&ladder_d(m, spec)).scale(scale / spec.eps));
    if let Some(lower) = mu.lowered(m) {
        out.push(mult_monomial(&lower, spec).scale(scale * mu.get(m) as f64));
    }
    out
}

/// `A^{0,1}` at the origin, one operator per `dzbar_k`:
/// `eps^{-1} sum_m a'_{k,m}(w) D_m + sum_m d a'_{k,m} / d w_m`.
pub fn build_a01_origin(jet: &MetricJet, spec: &BasisSpec) -> Result<Vec<OperatorSum>> {
    check_dims(jet, spec)?;
    let mut out = vec![OperatorSum::zero(spec.n); spec.n];
    for e in &jet.a_prime {
        out[e.k] = out[e.k].add(&divergence_term(e.value, e.m, &e.mu, spec));
    }
    Ok(out)
}

/// `A^{1,0}_j = -(A^{0,1}_j)^*`.
pub fn build_a10_origin(jet: &MetricJet, spec: &BasisSpec) -> Result<Vec<OperatorSum>> {
    Ok(build_a01_origin(jet, spec)?
        .iter()
        .map(|a| a.adjoint().scale(Complex64::new(-1.0, 0.0)))
        .collect())
}

/// `dA^{0,1}`, block `[j][k]` is the `dz_j ^ dzbar_k` coefficient built from `c_{jk,m}`.
pub fn build_da01_origin(jet: &MetricJet, spec: &BasisSpec) -> Result<Blocks> {
    check_dims(jet, spec)?;
    let n = spec.n;
    let mut out = vec![vec![OperatorSum::zero(n); n]; n];
    for e in &jet.c {
        out[e.j][e.k] = out[e.j][e.k].add(&divergence_term(e.value, e.m, &e.mu, spec));
    }
    Ok(out)
}

/// `dbar A^{1,0}`, block `[j][k] = (dA^{0,1})_{kj}^*`.
pub fn build_dbar_a10_origin(jet: &MetricJet, spec: &BasisSpec) -> Result<Blocks> {
    let p = build_da01_origin(jet, spec)?;
    let n = spec.n;
    Ok((0..n).map(|j| (0..n).map(|k| p[k][j].adjoint()).collect()).collect())
}

fn model_connection(spec: &BasisSpec) -> (Vec<OperatorSum>, Vec<OperatorSum>) {
    let none = CoefficientMutation::None;
    let a0 = (0..spec.n).map(|k| OperatorSum::from(connection01_operator(k, spec, none))).collect();
    let b0 = (0..spec.n).map(|j| OperatorSum::from(connection10_operator(j, spec, none))).collect();
    (a0, b0)
}

/// Flat curvature blocks `[B0_j, A0_k]` as operators.
pub fn model_blocks(spec: &BasisSpec) -> Blocks {
    let (a0, b0) = model_connection(spec);
    (0..spec.n)
        .map(|j| (0..spec.n).map(|k| b0[j].commutator(&a0[k])).collect())
        .collect()
}

/// Cross terms of the flat and correction connections, `[B0_j, A_k] + [A^{1,0}_j, A0_k]`.
pub fn build_coupling(jet: &MetricJet, spec: &BasisSpec) -> Result<Blocks> {
    let a = build_a01_origin(jet, spec)?;
    let a10 = build_a10_origin(jet, spec)?;
    let (a0, b0) = model_connection(spec);
    let n = spec.n;
    Ok((0..n)
        .map(|j| {
            (0..n)
                .map(|k| b0[j].commutator(&a[k]).add(&a10[j].commutator(&a0[k])).merge())
                .collect()
        })
        .collect())
}

/// `A^{1,0} ^ A^{0,1} + A^{0,1} ^ A^{1,0}`, block `[j][k] = [A^{1,0}_j, A^{0,1}_k]`.
pub fn build_wedge(jet: &MetricJet, spec: &BasisSpec) -> Result<Blocks> {
    let a = build_a01_origin(jet, spec)?;
    let a10 = build_a10_origin(jet, spec)?;
    let n = spec.n;
    Ok((0..n).map(|j| (0..n).map(|k| a10[j].commutator(&a[k])).collect()).collect())
}

/// Pairs `(conj(a'_{j,l,lambda}) s_lambda^{-1} a'_{k,m,mu} s_mu^{-1}, l, lambda, m, mu)`.
fn q_pairs(jet: &MetricJet, j: usize, k: usize) -> Vec<(Complex64, usize, MultiIndex, usize, MultiIndex)> {
    let mut out = Vec::new();
    for left in jet.a_prime.iter().filter(|e| e.k == j) {
        for right in jet.a_prime.iter().filter(|e| e.k == k) {
            let coef = left.value.conj() / sup_norm(&left.mu) * right.value / sup_norm(&right.mu);
            out.push((coef, left.m, left.mu.clone(), right.m, right.mu.clone()));
        }
    }
    out
}

/// The `eps^{-2}` part of the wedge by direct composition:
/// `-eps^{-2} sum coef (D*_l W^{*lambda} W^mu D_m - W^mu D_m D*_l W^{*lambda})`.
pub fn build_q(jet: &MetricJet, spec: &BasisSpec) -> Result<Blocks> {
    check_dims(jet, spec)?;
    let n = spec.n;
    let pre = -1.0 / (spec.eps * spec.eps);
    let mut out = vec![vec![OperatorSum::zero(n); n]; n];
    for (j, row) in out.iter_mut().enumerate() {
        for (k, block) in row.iter_mut().enumerate() {
            for (coef, l, lambda, m, mu) in q_pairs(jet, j, k) {
                let ds = ladder_dstar(l, spec);
                let wl = mult_monomial_adj(&lambda, spec);
                let wm = mult_monomial(&mu, spec);
                let d = ladder_d(m, spec);
                let y = ds.compose(&wl).compose(&wm).compose(&d);
                let x = wm.compose(&d).compose(&ds).compose(&wl);
                block.push(y.scale(coef * pre));
                block.push(x.scale(-coef * pre));
            }
        }
    }
    Ok(out)
}

/// One factor of a word in the ladder and multiplication operators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Factor {
    D(usize),
    DStar(usize),
    W(usize),
    WStar(usize),
    WMu(MultiIndex),
    WStarLambda(MultiIndex),
    /// `[D_m, D*_l]`
    CommDDstar(usize, usize),
    /// `[D_m, W*_i]`
    CommDWstar(usize, usize),
    /// `[W_i, D*_l]`
    CommWDstar(usize, usize),
    /// `[W_i, W*_j]`
    CommWWstar(usize, usize),
}

fn commutator_op(a: &MonomialOperator, b: &MonomialOperator) -> MonomialOperator {
    let ab = a.compose(b);
    let ba = b.compose(a);
    MonomialOperator::from_fn(ab.shift().to_vec(), move |alpha| ab.coefficient(alpha) - ba.coefficient(alpha))
}

impl Factor {
    pub fn operator(&self, spec: &BasisSpec) -> MonomialOperator {
        match self {
            Factor::D(m) => ladder_d(*m, spec),
            Factor::DStar(l) => ladder_dstar(*l, spec),
            Factor::W(i) => mult_w(*i, spec),
            Factor::WStar(i) => mult_wstar(*i, spec),
            Factor::WMu(mu) => mult_monomial(mu, spec),
            Factor::WStarLambda(l) => mult_monomial_adj(l, spec),
            Factor::CommDDstar(m, l) => commutator_op(&ladder_d(*m, spec), &ladder_dstar(*l, spec)),
            Factor::CommDWstar(m, i) => commutator_op(&ladder_d(*m, spec), &mult_wstar(*i, spec)),
            Factor::CommWDstar(i, l) => commutator_op(&mult_w(*i, spec), &ladder_dstar(*l, spec)),
            Factor::CommWWstar(i, j) => commutator_op(&mult_w(*i, spec), &mult_wstar(*j, spec)),
        }
    }

    /// Upper bound for `||F e_alpha||` when `|alpha| = d`.
    pub fn bound(&self, d: u32, spec: &BasisSpec) -> f64 {
        let dn = d as f64 + spec.n as f64;
        let eps = spec.eps;
        match self {
            Factor::D(_) => dn,
            Factor::DStar(_) => dn + 1.0,
            Factor::W(_) | Factor::WStar(_) => eps,
            Factor::WMu(mu) | Factor::WStarLambda(mu) => sup_norm(mu) * eps.powi(mu.degree() as i32),
            Factor::CommDDstar(..) => 2.0 * dn,
            Factor::CommDWstar(..) | Factor::CommWDstar(..) => eps,
            Factor::CommWWstar(..) => eps * eps / dn,
        }
    }
}

/// A word `F_1 F_2 ... F_r` (applied right to left) with a label.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionTerm {
    pub label: String,
    pub factors: Vec<Factor>,
}

impl ExpansionTerm {
    pub fn operator(&self, spec: &BasisSpec) -> MonomialOperator {
        let mut ops = self.factors.iter().map(|f| f.operator(spec));
        let first = ops.next().expect("non-empty word");
        ops.fold(first, |acc, f| acc.compose(&f))
    }

    /// `(||word e_alpha||, product of factor bounds along the actual degrees)`.
    pub fn image_and_bound(&self, alpha: &MultiIndex, spec: &BasisSpec) -> (f64, f64) {
        let mut current = alpha.clone();
        let mut norm = 1.0;
        let mut bound = 1.0;
        for f in self.factors.iter().rev() {
            bound *= f.bound(current.degree(), spec);
            match f.operator(spec).apply_basis(&current) {
                Some((next, c)) => {
                    norm *= c.norm();
                    current = next;
                }
                None => return (0.0, bound),
            }
        }
        (norm, bound)
    }
}

fn axes_of(mu: &MultiIndex) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &k) in mu.exponents().iter().enumerate() {
        out.extend(std::iter::repeat_n(i, k as usize));
    }
    out
}

/// The `1 + |lambda| + |mu| + |lambda||mu|` commutator words `T` with
/// `W^mu D_m D*_l W^{*lambda} - D*_l W^{*lambda} W^mu D_m = sum T`.
pub fn q_expansion_terms(l: usize, lambda: &MultiIndex, m: usize, mu: &MultiIndex) -> Vec<ExpansionTerm> {
    let ws = axes_of(mu);
    let wstars = axes_of(lambda);
    let w = |axes: &[usize]| axes.iter().map(|&i| Factor::W(i)).collect::<Vec<_>>();
    let wst = |axes: &[usize]| axes.iter().map(|&i| Factor::WStar(i)).collect::<Vec<_>>();
    let mut out = Vec::new();

    let mut t1 = w(&ws);
    t1.push(Factor::CommDDstar(m, l));
    t1.extend(wst(&wstars));
    out.push(ExpansionTerm { label: "[D,D*]".into(), factors: t1 });

    for (i, &axis) in wstars.iter().enumerate() {
        let mut t = w(&ws);
        t.push(Factor::DStar(l));
        t.extend(wst(&wstars[..i]));
        t.push(Factor::CommDWstar(m, axis));
        t.extend(wst(&wstars[i + 1..]));
        out.push(ExpansionTerm { label: format!("[D,W*] #{}", i + 1), factors: t });
    }

    for (i, &axis) in ws.iter().enumerate() {
        let mut t = w(&ws[..i]);
        t.push(Factor::CommWDstar(axis, l));
        t.extend(w(&ws[i + 1..]));
        t.extend(wst(&wstars));
        t.push(Factor::D(m));
        out.push(ExpansionTerm { label: format!("[W,D*] #{}", i + 1), factors: t });
    }

    for (i, &wa) in ws.iter().enumerate() {
        for (jj, &sa) in wstars.iter().enumerate() {
            let mut t = vec![Factor::DStar(l)];
            t.extend(w(&ws[..i]));
            t.extend(wst(&wstars[..jj]));
            t.push(Factor::CommWWstar(wa, sa));
            t.extend(wst(&wstars[jj + 1..]));
            t.extend(w(&ws[i + 1..]));
            t.push(Factor::D(m));
            out.push(ExpansionTerm { label: format!("[W,W*] #{},{}", i + 1, jj + 1), factors: t });
        }
    }
    out
}

/// [`build_q`] through the commutator expansion, using single-variable
/// multiplication factors instead of the closed-form `W^mu`.
pub fn build_q_expanded(jet: &MetricJet, spec: &BasisSpec) -> Result<Blocks> {
    check_dims(jet, spec)?;
    let n = spec.n;
    let pre = 1.0 / (spec.eps * spec.eps);
    let mut out = vec![vec![OperatorSum::zero(n); n]; n];
    for (j, row) in out.iter_mut().enumerate() {
        for (k, block) in row.iter_mut().enumerate() {
            for (coef, l, lambda, m, mu) in q_pairs(jet, j, k) {
                for t in q_expansion_terms(l, &lambda, m, &mu) {
                    block.push(t.operator(spec).scale(coef * pre));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct WordBoundReport {
    pub words: usize,
    pub cases: usize,
    pub worst_ratio: f64,
    pub worst_word: String,
    pub passed: bool,
}

/// Checks `||word e_alpha|| <= product of factor bounds` for the connection
/// words `W^mu D_m`, `D*_l W^{*lambda}` and every commutator word of `Q`,
/// over all `|alpha| <= N`.
pub fn word_bound_check(jet: &MetricJet, spec: &BasisSpec) -> Result<WordBoundReport> {
    check_dims(jet, spec)?;
    let mut words = Vec::new();
    for e in &jet.a_prime {
        words.push(ExpansionTerm { label: format!("W^{} D_{}", e.mu, e.m + 1), factors: vec![Factor::WMu(e.mu.clone()), Factor::D(e.m)] });
        words.push(ExpansionTerm {
            label: format!("D*_{} W*^{}", e.m + 1, e.mu),
            factors: vec![Factor::DStar(e.m), Factor::WStarLambda(e.mu.clone())],
        });
    }
    for left in &jet.a_prime {
        for right in &jet.a_prime {
            words.extend(q_expansion_terms(left.m, &left.mu, right.m, &right.mu));
        }
    }
    let mut report = WordBoundReport { words: words.len(), cases: 0, worst_ratio: 0.0, worst_word: String::new(), passed: true };
    for alpha in spec.indices() {
        for w in &words {
            let (norm, bound) = w.image_and_bound(&alpha, spec);
            report.cases += 1;
            let ratio = if bound > 0.0 { norm / bound } else if norm > 0.0 { f64::INFINITY } else { 0.0 };
            if ratio > report.worst_ratio {
                report.worst_ratio = ratio;
                report.worst_word = format!("{} on {alpha}", w.label);
            }
        }
    }
    report.passed = report.worst_ratio <= 1.0 + 1e-12;
    Ok(report)
}
