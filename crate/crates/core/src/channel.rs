//! Discrete memoryless channels and their quality functionals: TVD-information
//! `T(W)`, Bhattacharyya parameter `Z(W)` and capacity `C(W)` (base-2 logs).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-12;
const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Discrete channel with transition matrix `W(y|x)` stored row-major by input.
#[derive(Clone, Debug, PartialEq)]
pub struct Dmc {
    input_size: usize,
    output_size: usize,
    transition: Vec<f64>,
}

impl Dmc {
    pub fn new(input_size: usize, output_size: usize, transition: Vec<f64>) -> Result<Self> {
        if transition.len() != input_size * output_size {
            return Err(Error::Shape(format!(
                "{} entries for a {input_size}x{output_size} channel",
                transition.len()
            )));
        }
        if transition.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidDistribution(
                "transition entries must lie in [0, 1]".into(),
            ));
        }
        for x in 0..input_size {
            let sum: f64 = transition[x * output_size..(x + 1) * output_size]
                .iter()
                .sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::InvalidDistribution(format!("row {x} sums to {sum}")));
            }
        }
        Ok(Self {
            input_size,
            output_size,
            transition,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let output_size = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != output_size) {
            return Err(Error::Shape("ragged transition rows".into()));
        }
        Self::new(rows.len(), output_size, rows.concat())
    }

    /// Noiseless channel on `size` symbols.
    pub fn identity(size: usize) -> Self {
        let mut t = vec![0.0; size * size];
        for i in 0..size {
            t[i * size + i] = 1.0;
        }
        Self {
            input_size: size,
            output_size: size,
            transition: t,
        }
    }

    pub fn bsc(crossover: f64) -> Result<Self> {
        check_probability(crossover)?;
        Self::new(
            2,
            2,
            vec![1.0 - crossover, crossover, crossover, 1.0 - crossover],
        )
    }

    /// BEC as a 2x3 channel with outputs ordered `{0, ?, 1}`.
    pub fn bec(erasure: f64) -> Result<Self> {
        check_probability(erasure)?;
        Self::new(
            2,
            3,
            vec![1.0 - erasure, erasure, 0.0, 0.0, erasure, 1.0 - erasure],
        )
    }

    /// Erasure post-processor on the ternary alphabet `{0, ?, 1}`: each
    /// unerased symbol is erased with probability `p0`, erasures stay erased.
    pub fn erasure_postprocessor(p0: f64) -> Result<Self> {
        check_probability(p0)?;
        Self::new(
            3,
            3,
            vec![1.0 - p0, p0, 0.0, 0.0, 1.0, 0.0, 0.0, p0, 1.0 - p0],
        )
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.transition[x * self.output_size + y]
    }

    fn uniform_input(&self) -> Vec<f64> {
        vec![1.0 / self.input_size as f64; self.input_size]
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "probability {p} outside [0, 1]"
        )))
    }
}

/// Binary erasure channel, kept as a bare parameter on the fast path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bec {
    erasure_prob: f64,
}

impl Bec {
    pub fn new(erasure_prob: f64) -> Result<Self> {
        check_probability(erasure_prob)?;
        Ok(Self { erasure_prob })
    }

    pub fn erasure_prob(&self) -> f64 {
        self.erasure_prob
    }

    pub fn to_dmc(&self) -> Dmc {
        Dmc::bec(self.erasure_prob).expect("validated on construction")
    }
}

/// `(T, Z, C)` of a BEC in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BecMetrics {
    pub tvd: f64,
    pub bhattacharyya: f64,
    pub capacity: f64,
}

pub fn bec_metrics(c: Bec) -> BecMetrics {
    let e = c.erasure_prob();
    BecMetrics {
        tvd: 1.0 - e,
        bhattacharyya: e,
        capacity: 1.0 - e,
    }
}

/// `T(W, p_X) = sum_{x,y} |p(x,y) - p(x) p(y)|`, i.e. twice the total
/// variation distance between the joint law and the product of marginals.
pub fn t_information(w: &Dmc, p_x: &[f64]) -> Result<f64> {
    if p_x.len() != w.input_size {
        return Err(Error::Shape(format!(
            "input distribution has {} entries, channel has {} inputs",
            p_x.len(),
            w.input_size
        )));
    }
    let total: f64 = p_x.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE || p_x.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "input distribution sums to {total}"
        )));
    }
    let p_y: Vec<f64> = (0..w.output_size)
        .map(|y| (0..w.input_size).map(|x| p_x[x] * w.prob(x, y)).sum())
        .collect();
    let mut t = 0.0;
    for (x, &px) in p_x.iter().enumerate() {
        for (y, &py) in p_y.iter().enumerate() {
            t += (px * w.prob(x, y) - px * py).abs();
        }
    }
    Ok(t)
}

/// How [`tvd_of_channel`] locates the maximizing input distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvdMode {
    /// Caller asserts Gallager symmetry; the uniform input is the maximizer.
    Symmetric,
    /// Maximum over a lattice on the input simplex with `points` levels per
    /// coordinate (101 gives 0.01 steps).
    Grid { points: usize },
}

pub fn tvd_of_channel(w: &Dmc, mode: TvdMode) -> f64 {
    match mode {
        TvdMode::Symmetric => {
            t_information(w, &w.uniform_input()).expect("uniform input is a valid distribution")
        }
        TvdMode::Grid { points } => simplex_grid(w.input_size, points.max(2))
            .into_iter()
            .map(|p| t_information(w, &p).expect("grid points are distributions"))
            .fold(0.0, f64::max),
    }
}

/// All distributions on `k` symbols whose entries are multiples of `1/(points-1)`.
pub fn simplex_grid(k: usize, points: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(k - 1, left - a, prefix, out);
            prefix.pop();
        }
    }
    let steps = points - 1;
    let mut raw = Vec::new();
    if k > 0 {
        rec(k, steps, &mut Vec::new(), &mut raw);
    }
    raw.into_iter()
        .map(|c| c.into_iter().map(|a| a as f64 / steps as f64).collect())
        .collect()
}

pub fn bhattacharyya(w: &Dmc) -> Result<f64> {
    if w.input_size != 2 {
        return Err(Error::NonBinaryInput(w.input_size));
    }
    Ok((0..w.output_size)
        .map(|y| (w.prob(0, y) * w.prob(1, y)).sqrt())
        .sum())
}

/// Mutual information in bits at the uniform input, with `0 log 0 = 0`.
pub fn capacity_uniform(w: &Dmc) -> f64 {
    let px = 1.0 / w.input_size as f64;
    let p_y: Vec<f64> = (0..w.output_size)
        .map(|y| (0..w.input_size).map(|x| px * w.prob(x, y)).sum())
        .collect();
    let mut info = 0.0;
    for x in 0..w.input_size {
        for (y, &py) in p_y.iter().enumerate() {
            let t = w.prob(x, y);
            if t > 0.0 {
                info += px * t * (t / py).log2();
            }
        }
    }
    info.max(0.0)
}

/// Channel `Q(z|x) = sum_y W(y|x) P(z|y)`.
pub fn degrade(w: &Dmc, p: &Dmc) -> Result<Dmc> {
    if p.input_size != w.output_size {
        return Err(Error::Shape(format!(
            "post-processor has {} inputs, channel has {} outputs",
            p.input_size, w.output_size
        )));
    }
    let mut t = vec![0.0; w.input_size * p.output_size];
    for x in 0..w.input_size {
        for y in 0..w.output_size {
            let wy = w.prob(x, y);
            if wy == 0.0 {
                continue;
            }
            for z in 0..p.output_size {
                t[x * p.output_size + z] += wy * p.prob(y, z);
            }
        }
    }
    Ok(Dmc {
        input_size: w.input_size,
        output_size: p.output_size,
        transition: t,
    })
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    h(p) + h(1.0 - p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn bec_tvd_is_one_minus_p() {
        for p in [0.0, 0.1, 0.3, 0.5, 1.0] {
            let w = Dmc::bec(p).unwrap();
            close(t_information(&w, &[0.5, 0.5]).unwrap(), 1.0 - p, 1e-15);
        }
        close(
            tvd_of_channel(&Dmc::bec(0.3).unwrap(), TvdMode::Symmetric),
            0.7,
            1e-15,
        );
    }

    #[test]
    fn point_mass_input_has_no_information() {
        let w = Dmc::bsc(0.2).unwrap();
        assert_eq!(t_information(&w, &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(
            t_information(&Dmc::bec(0.4).unwrap(), &[0.0, 1.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn bsc_tvd_by_direct_summation() {
        // |0.45 - 0.25| twice, |0.05 - 0.25| twice
        let expected = 2.0 * (0.45f64 - 0.25).abs() + 2.0 * (0.05f64 - 0.25).abs();
        let w = Dmc::bsc(0.1).unwrap();
        close(t_information(&w, &[0.5, 0.5]).unwrap(), expected, 1e-15);
        close(expected, 0.8, 1e-15);
        close(tvd_of_channel(&w, TvdMode::Grid { points: 101 }), 0.8, 1e-6);
        assert_eq!(
            tvd_of_channel(&Dmc::bsc(0.5).unwrap(), TvdMode::Symmetric),
            0.0
        );
    }

    #[test]
    fn rejects_bad_input_distribution() {
        let w = Dmc::bsc(0.1).unwrap();
        assert!(matches!(
            t_information(&w, &[0.6, 0.6]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(t_information(&w, &[1.0]).is_err());
    }

    #[test]
    fn bhattacharyya_examples() {
        close(
            bhattacharyya(&Dmc::bec(0.37).unwrap()).unwrap(),
            0.37,
            1e-15,
        );
        let q: f64 = 0.11;
        close(
            bhattacharyya(&Dmc::bsc(q).unwrap()).unwrap(),
            2.0 * (q * (1.0 - q)).sqrt(),
            1e-15,
        );
        assert_eq!(bhattacharyya(&Dmc::identity(2)).unwrap(), 0.0);
        assert_eq!(
            bhattacharyya(&Dmc::identity(3)),
            Err(Error::NonBinaryInput(3))
        );
    }

    #[test]
    fn capacity_examples() {
        close(capacity_uniform(&Dmc::bec(0.3).unwrap()), 0.7, 1e-14);
        close(capacity_uniform(&Dmc::bsc(0.5).unwrap()), 0.0, 1e-15);
        close(
            capacity_uniform(&Dmc::bsc(0.1).unwrap()),
            1.0 - binary_entropy(0.1),
            1e-14,
        );
        close(capacity_uniform(&Dmc::bsc(0.1).unwrap()), 0.5310, 1e-4);
    }

    #[test]
    fn degrade_examples() {
        let w = Dmc::bsc(0.2).unwrap();
        assert_eq!(degrade(&w, &Dmc::identity(2)).unwrap(), w);

        let (pb, p0) = (0.05, 0.2631578947368421);
        let q = degrade(
            &Dmc::bec(pb).unwrap(),
            &Dmc::erasure_postprocessor(p0).unwrap(),
        )
        .unwrap();
        let expected = Dmc::bec(pb + (1.0 - pb) * p0).unwrap();
        for x in 0..2 {
            for y in 0..3 {
                close(q.prob(x, y), expected.prob(x, y), 1e-15);
            }
        }

        let (a, b) = (0.1, 0.3);
        let q = degrade(&Dmc::bsc(a).unwrap(), &Dmc::bsc(b).unwrap()).unwrap();
        close(q.prob(0, 1), a + b - 2.0 * a * b, 1e-15);
        close(q.prob(1, 0), a + b - 2.0 * a * b, 1e-15);

        assert!(degrade(&w, &Dmc::identity(3)).is_err());
    }

    #[test]
    fn bec_metrics_examples() {
        let m = |e| bec_metrics(Bec::new(e).unwrap());
        assert_eq!(
            m(0.0),
            BecMetrics {
                tvd: 1.0,
                bhattacharyya: 0.0,
                capacity: 1.0
            }
        );
        assert_eq!(
            m(1.0),
            BecMetrics {
                tvd: 0.0,
                bhattacharyya: 1.0,
                capacity: 0.0
            }
        );
        let r = m(0.3);
        close(r.tvd, 0.7, 1e-15);
        close(r.bhattacharyya, 0.3, 1e-15);
        close(r.capacity, 0.7, 1e-15);
        assert!(Bec::new(1.5).is_err());
    }

    #[test]
    fn dmc_validation() {
        assert!(Dmc::new(2, 2, vec![0.5, 0.5, 0.2, 0.7]).is_err());
        assert!(Dmc::new(2, 2, vec![0.5, 0.5]).is_err());
        assert!(Dmc::new(1, 2, vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn simplex_grid_sizes() {
        assert_eq!(simplex_grid(2, 101).len(), 101);
        assert_eq!(simplex_grid(3, 5).len(), 15);
        for p in simplex_grid(3, 5) {
            close(p.iter().sum::<f64>(), 1.0, 1e-12);
        }
    }
}
