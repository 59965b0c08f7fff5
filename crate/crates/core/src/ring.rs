//! A minimal commutative-ring interface shared by the coefficient ring, the
//! group ring and its normalization, so that determinants are written once.

/// Operations of a commutative ring with identity whose elements are plain
/// values and whose parameters live in the ring object.
pub trait CommRing {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
}

/// Determinant of a square matrix, given as a list of columns, by cofactor
/// expansion along the first row. No division is performed, so this is valid
/// over rings with zero divisors.
pub fn det_cofactor<R: CommRing>(ring: &R, columns: &[&[R::Elem]]) -> R::Elem {
    let n = columns.len();
    if n == 0 {
        return ring.one();
    }
    debug_assert!(columns.iter().all(|c| c.len() == n));
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    expand(ring, columns, &rows, &cols)
}

fn expand<R: CommRing>(
    ring: &R,
    columns: &[&[R::Elem]],
    rows: &[usize],
    cols: &[usize],
) -> R::Elem {
    match rows.len() {
        1 => columns[cols[0]][rows[0]].clone(),
        2 => {
            let a = &columns[cols[0]][rows[0]];
            let b = &columns[cols[1]][rows[0]];
            let c = &columns[cols[0]][rows[1]];
            let d = &columns[cols[1]][rows[1]];
            ring.sub(&ring.mul(a, d), &ring.mul(b, c))
        }
        _ => {
            let top = rows[0];
            let rest = &rows[1..];
            let mut acc = ring.zero();
            let mut minor_cols = Vec::with_capacity(cols.len() - 1);
            for (k, &c) in cols.iter().enumerate() {
                let entry = &columns[c][top];
                if ring.is_zero(entry) {
                    continue;
                }
                minor_cols.clear();
                minor_cols.extend(
                    cols.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != k)
                        .map(|(_, &x)| x),
                );
                let term = ring.mul(entry, &expand(ring, columns, rest, &minor_cols));
                acc = if k % 2 == 0 {
                    ring.add(&acc, &term)
                } else {
                    ring.sub(&acc, &term)
                };
            }
            acc
        }
    }
}
