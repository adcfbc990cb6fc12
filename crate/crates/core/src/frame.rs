use nalgebra::Vector3;

/// Orthonormal frame whose third axis points along a chosen direction.
///
/// `perp1` is built by crossing the direction with the coordinate axis of its
/// smallest-magnitude component (ties resolve to the lowest index), so the same
/// direction always yields the same frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triad {
    pub perp1: Vector3<f64>,
    pub perp2: Vector3<f64>,
    pub parallel: Vector3<f64>,
}

impl Triad {
    /// Frame aligned with `direction`; a zero vector gives the coordinate frame
    /// with `parallel = ẑ`.
    pub fn along(direction: &Vector3<f64>) -> Self {
        let norm = direction.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Triad {
                perp1: Vector3::x(),
                perp2: Vector3::y(),
                parallel: Vector3::z(),
            };
        }
        let n = direction / norm;
        let pivot = (0..3)
            .min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()))
            .unwrap_or(0);
        let mut axis = Vector3::zeros();
        axis[pivot] = 1.0;
        let perp1 = axis.cross(&n).normalize();
        let perp2 = n.cross(&perp1);
        Triad {
            perp1,
            perp2,
            parallel: n,
        }
    }

    /// Components `(perp1, perp2, parallel)` of a lab-frame vector.
    pub fn components(&self, v: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(v.dot(&self.perp1), v.dot(&self.perp2), v.dot(&self.parallel))
    }

    /// Lab-frame vector from components `(perp1, perp2, parallel)`.
    pub fn compose(&self, c: &Vector3<f64>) -> Vector3<f64> {
        self.perp1 * c[0] + self.perp2 * c[1] + self.parallel * c[2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn frame_is_orthonormal_and_right_handed() {
        for d in [
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(1.0, 2.0, 3.0),
            Vector3::new(-0.3, 0.0, 0.0),
            Vector3::new(1.0, 1.0, 1.0),
        ] {
            let t = Triad::along(&d);
            assert_abs_diff_eq!(t.parallel.dot(&d.normalize()), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(t.perp1.dot(&t.parallel), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(t.perp2.dot(&t.parallel), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(t.perp1.dot(&t.perp2), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(t.perp1.norm(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!((t.perp1.cross(&t.perp2) - t.parallel).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn round_trip_components() {
        let t = Triad::along(&Vector3::new(0.2, -1.0, 0.7));
        let v = Vector3::new(3.0, -4.0, 0.5);
        assert_abs_diff_eq!((t.compose(&t.components(&v)) - v).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_direction_falls_back_to_coordinates() {
        let t = Triad::along(&Vector3::zeros());
        assert_eq!(t.parallel, Vector3::z());
    }
}
