use super::{QTable, TableFunctional};
use crate::mdp::StochasticPolicy;
use crate::{Error, Result};

fn check_finite(what: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Numeric(format!("{what} is not finite ({x})")))
    }
}

/// Asynchronous Q-learning step on one pair:
/// `Q(s,a) <- (1 - alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a'))`.
#[allow(clippy::too_many_arguments)]
pub fn q_update_discounted(
    q: &mut QTable,
    s: usize,
    a: usize,
    clipped_r: f64,
    s_next: usize,
    gamma: f64,
    alpha: f64,
) -> Result<()> {
    check_finite("reward", clipped_r)?;
    check_finite("gamma", gamma)?;
    check_finite("alpha", alpha)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Argument(format!("alpha must lie in [0,1) (got {alpha})")));
    }
    let target = clipped_r + gamma * q.max_at(s_next);
    let updated = (1.0 - alpha) * q.get(s, a) + alpha * target;
    check_finite("updated Q entry", updated)?;
    q.set(s, a, updated);
    Ok(())
}

/// The RVI increment `r + max_a' Q(s',a') - f(Q) - Q(s,a)`.
#[inline]
pub fn rvi_increment(q: &QTable, s: usize, a: usize, clipped_r: f64, s_next: usize, f_value: f64) -> f64 {
    clipped_r + q.max_at(s_next) - f_value - q.get(s, a)
}

/// RVI Q-learning step on one pair:
/// `Q(s,a) <- Q(s,a) + beta (r + max_a' Q(s',a') - f(Q) - Q(s,a))`.
///
/// The max over randomized policies at the next state is attained at a
/// single action, so it is taken over actions.
pub fn rvi_update_average(
    q: &mut QTable,
    s: usize,
    a: usize,
    clipped_r: f64,
    s_next: usize,
    beta: f64,
    f: &dyn TableFunctional,
) -> Result<()> {
    check_finite("reward", clipped_r)?;
    check_finite("beta", beta)?;
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Argument(format!("beta must lie in [0,1] (got {beta})")));
    }
    let f_value = f.eval(q);
    check_finite("f(Q)", f_value)?;
    let updated = q.get(s, a) + beta * rvi_increment(q, s, a, clipped_r, s_next, f_value);
    check_finite("updated Q entry", updated)?;
    q.set(s, a, updated);
    Ok(())
}

/// Uniform distribution over each row's near-maximal actions.
pub fn greedy_policy(q: &QTable, tie_tolerance: f64) -> StochasticPolicy {
    let sets: Vec<Vec<usize>> = (0..q.n_states()).map(|s| q.argmax_set(s, tie_tolerance)).collect();
    StochasticPolicy::uniform_over(&sets, q.n_actions())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::RviFunctional;

    #[test]
    fn discounted_update_arithmetic() {
        let mut q = QTable::from_rows(vec![vec![0.0], vec![2.0]]).unwrap();
        q_update_discounted(&mut q, 0, 0, 1.0, 1, 0.9, 0.5).unwrap();
        assert!((q.get(0, 0) - 1.4).abs() < 1e-12);
        assert_eq!(q.get(1, 0), 2.0);

        let before = q.clone();
        q_update_discounted(&mut q, 0, 0, 5.0, 1, 0.9, 0.0).unwrap();
        assert_eq!(q, before);
    }

    #[test]
    fn discounted_update_rejects_bad_inputs() {
        let mut q = QTable::new(1, 1, 0.0);
        assert!(matches!(
            q_update_discounted(&mut q, 0, 0, f64::NAN, 0, 0.9, 0.5),
            Err(Error::Numeric(_))
        ));
        assert!(matches!(
            q_update_discounted(&mut q, 0, 0, 1.0, 0, 0.9, 1.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn single_pair_discounted_fixed_point() {
        // Q = 1 + 0.5 Q has the solution 2. With alpha = 1/(k+1) the error
        // contracts by (1 - 0.5/(k+1)) per step, i.e. like k^-1/2.
        let mut q = QTable::new(1, 1, 0.0);
        let mut last_err = f64::INFINITY;
        for k in 1..=200_000u64 {
            q_update_discounted(&mut q, 0, 0, 1.0, 0, 0.5, 1.0 / (k as f64 + 1.0)).unwrap();
            let err = (q.get(0, 0) - 2.0).abs();
            assert!(err < last_err);
            last_err = err;
        }
        assert!(last_err < 1e-2, "{last_err}");
        // The default polynomial rate gets there much faster.
        let mut q = QTable::new(1, 1, 0.0);
        for k in 1..=200_000u64 {
            q_update_discounted(&mut q, 0, 0, 1.0, 0, 0.5, (k as f64 + 1.0).powf(-0.7)).unwrap();
        }
        assert!((q.get(0, 0) - 2.0).abs() < 1e-3, "{}", q.get(0, 0));
    }

    #[test]
    fn rvi_update_arithmetic() {
        let mut q = QTable::new(2, 2, 0.0);
        rvi_update_average(&mut q, 0, 1, 1.0, 1, 1.0, &RviFunctional::MeanOfTable).unwrap();
        assert_eq!(q.get(0, 1), 1.0);
        assert_eq!(q.values().iter().filter(|&&v| v != 0.0).count(), 1);
        let before = q.clone();
        rvi_update_average(&mut q, 1, 1, 3.0, 0, 0.0, &RviFunctional::MeanOfTable).unwrap();
        assert_eq!(q, before);
    }

    #[test]
    fn single_pair_rvi_converges_to_gain() {
        // h + v = 1 + h gives v = 1; with f = Q(0,0) the fixed point is Q = 1.
        let f = RviFunctional::ReferenceEntry { state: 0, action: 0 };
        let mut q = QTable::new(1, 1, 0.0);
        for k in 1..=10_000u64 {
            rvi_update_average(&mut q, 0, 0, 1.0, 0, 1.0 / (k as f64 + 1.0), &f).unwrap();
        }
        assert!((q.get(0, 0) - 1.0).abs() < 1e-3);
        assert!((f.eval(&q) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn greedy_examples() {
        let q = QTable::from_rows(vec![vec![1.0, 3.0, 3.0], vec![1.0, 2.0, 3.0], vec![0.0; 3]]).unwrap();
        let p = greedy_policy(&q, 1e-9);
        assert_eq!(p.row(0), &[0.0, 0.5, 0.5]);
        assert_eq!(p.row(1), &[0.0, 0.0, 1.0]);
        for &x in p.row(2) {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }
}
