use super::path::MarkedPath;

/// Indices `i_0 < ... < i_m` into a path; marks decrease up to position
/// `min_position` and increase afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub indices: Vec<usize>,
    /// Position of the oldest vertex within `indices`.
    pub min_position: usize,
}

impl Skeleton {
    /// Length `m` (number of skeleton edges).
    pub fn m(&self) -> usize {
        self.indices.len() - 1
    }

    pub fn k(&self) -> usize {
        self.min_position
    }

    pub fn min_mark(&self, path: &MarkedPath) -> f64 {
        path.mark(self.indices[self.min_position])
    }

    /// True if marks strictly decrease to the minimum and then strictly
    /// increase.
    pub fn is_valley(&self, path: &MarkedPath) -> bool {
        let m: Vec<f64> = self.indices.iter().map(|&i| path.mark(i)).collect();
        let k = self.min_position;
        m[..=k].windows(2).all(|w| w[0] > w[1]) && m[k..].windows(2).all(|w| w[0] < w[1])
    }

    fn from_indices(indices: Vec<usize>, path: &MarkedPath) -> Self {
        let min_position = (0..indices.len())
            .min_by(|&a, &b| path.mark(indices[a]).total_cmp(&path.mark(indices[b])))
            .expect("nonempty");
        Self {
            indices,
            min_position,
        }
    }
}

/// Forward and backward strict running minima, up to the oldest vertex.
pub fn skeleton_scan(path: &MarkedPath) -> Skeleton {
    let n = path.len();
    let kmin = path.argmin_mark();
    let mut fwd = vec![0];
    let mut cur = path.mark(0);
    for i in 1..=kmin {
        if path.mark(i) < cur {
            cur = path.mark(i);
            fwd.push(i);
        }
    }
    let mut bwd = vec![];
    if kmin != n - 1 {
        bwd.push(n - 1);
        let mut cur = path.mark(n - 1);
        for i in (kmin..n - 1).rev() {
            if path.mark(i) < cur {
                cur = path.mark(i);
                bwd.push(i);
            }
        }
        // kmin is already the last entry of the forward pass
        bwd.pop();
    }
    fwd.extend(bwd.into_iter().rev());
    Skeleton::from_indices(fwd, path)
}

/// One removal of the local-maxima construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalStep {
    /// Path position of the removed vertex.
    pub index: usize,
    pub mark: f64,
    /// Positions still present after the removal.
    pub remaining: Vec<usize>,
}

/// Repeatedly removes the youngest interior local maximum.
pub fn skeleton_local_maxima(path: &MarkedPath) -> Skeleton {
    skeleton_local_maxima_trace(path).0
}

pub fn skeleton_local_maxima_trace(path: &MarkedPath) -> (Skeleton, Vec<RemovalStep>) {
    let mut alive: Vec<usize> = (0..path.len()).collect();
    let mut steps = Vec::new();
    loop {
        let youngest = (1..alive.len().saturating_sub(1))
            .filter(|&q| {
                let t = path.mark(alive[q]);
                t > path.mark(alive[q - 1]) && t > path.mark(alive[q + 1])
            })
            .max_by(|&a, &b| path.mark(alive[a]).total_cmp(&path.mark(alive[b])));
        match youngest {
            None => break,
            Some(q) => {
                let index = alive.remove(q);
                steps.push(RemovalStep {
                    index,
                    mark: path.mark(index),
                    remaining: alive.clone(),
                });
            }
        }
    }
    (Skeleton::from_indices(alive, path), steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    Irregular,
}

/// Regular iff the oldest skeleton mark exceeds `2^{-m}` strictly. A
/// single-vertex skeleton is therefore always irregular.
pub fn classify_regularity(skeleton: &Skeleton, path: &MarkedPath) -> Regularity {
    if skeleton.min_mark(path) > 0.5f64.powi(skeleton.m() as i32) {
        Regularity::Regular
    } else {
        Regularity::Irregular
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path(m: &[f64]) -> MarkedPath {
        MarkedPath::from_marks(m).unwrap()
    }

    #[test]
    fn worked_example() {
        let p = path(&[0.5, 0.3, 0.7, 0.2, 0.6, 0.4]);
        let s = skeleton_scan(&p);
        assert_eq!(s.indices, vec![0, 1, 3, 5]);
        assert_eq!((s.m(), s.k()), (3, 2));
        let (t, steps) = skeleton_local_maxima_trace(&p);
        assert_eq!(t, s);
        let removed: Vec<f64> = steps.iter().map(|x| x.mark).collect();
        assert_eq!(removed, vec![0.7, 0.6]);
        assert_eq!(classify_regularity(&s, &p), Regularity::Regular);
    }

    #[test]
    fn monotone_and_single() {
        let p = path(&[0.9, 0.7, 0.4, 0.1]);
        let s = skeleton_scan(&p);
        assert_eq!(s.indices, vec![0, 1, 2, 3]);
        assert_eq!(s.k(), s.m());
        let p = path(&[0.1, 0.4, 0.7, 0.9]);
        let s = skeleton_local_maxima(&p);
        assert_eq!(s.indices, vec![0, 1, 2, 3]);
        assert_eq!(s.k(), 0);
        let p = path(&[0.3]);
        let s = skeleton_scan(&p);
        assert_eq!((s.indices.clone(), s.m()), (vec![0], 0));
        assert_eq!(classify_regularity(&s, &p), Regularity::Irregular);
        assert_eq!(skeleton_local_maxima(&p), s);
    }

    #[test]
    fn regularity_threshold() {
        // m = 3 skeletons with oldest marks 0.2 and 0.1
        let p = path(&[0.5, 0.3, 0.2, 0.4]);
        let s = skeleton_scan(&p);
        assert_eq!(s.m(), 3);
        assert_eq!(classify_regularity(&s, &p), Regularity::Regular);
        let p = path(&[0.5, 0.3, 0.1, 0.4]);
        assert_eq!(classify_regularity(&skeleton_scan(&p), &p), Regularity::Irregular);
        // boundary: exactly 2^{-m} is irregular
        let p = path(&[0.5, 0.125, 0.3, 0.4]);
        let s = skeleton_scan(&p);
        assert_eq!(s.m(), 3);
        assert_eq!(classify_regularity(&s, &p), Regularity::Irregular);
    }

    #[test]
    fn constructions_agree_on_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20_000 {
            let n = rng.gen_range(1..=20);
            let marks: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
            let p = path(&marks);
            let a = skeleton_scan(&p);
            assert_eq!(a, skeleton_local_maxima(&p));
            assert!(a.is_valley(&p));
            assert_eq!(a.indices[a.k()], p.argmin_mark());
        }
    }
}
