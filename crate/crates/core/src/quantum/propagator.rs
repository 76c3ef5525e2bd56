use anosov_linalg::{vector, ComplexMatrix, Dft};

use super::norm_upper_bound;
use super::planck::{PlanckData, TorusOperator};
use super::weyl::{weyl_unbounded, HalfRoots, SymbolAction};
use crate::classical::{HyperbolicToralMap, TrigPolynomial};
use crate::{Error, Result, C64};

type IntMatrix = [[i64; 2]; 2];

/// SL(2, ℤ) generators: R = [[0,1],[−1,0]], R⁻¹ and the lower shear L_c = [[1,0],[c,1]].
#[derive(Debug, Clone, Copy, PartialEq)]
enum Generator {
    R,
    RInv,
    Shear(i64),
}

impl Generator {
    fn matrix(self) -> IntMatrix {
        match self {
            Generator::R => [[0, 1], [-1, 0]],
            Generator::RInv => [[0, -1], [1, 0]],
            Generator::Shear(c) => [[1, 0], [c, 1]],
        }
    }

    fn inverse(self) -> Self {
        match self {
            Generator::R => Generator::RInv,
            Generator::RInv => Generator::R,
            Generator::Shear(c) => Generator::Shear(-c),
        }
    }
}

fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Writes A ∈ SL(2, ℤ) as a word in the generators (left to right product).
///
/// Euclid's algorithm on the first column by left multiplication, then the
/// remaining upper shear [[1,b],[0,1]] = R·L_{−b}·R⁻¹.
fn decompose(a: IntMatrix) -> Vec<Generator> {
    let mut m = a;
    let mut ops = Vec::new();
    let push = |g: Generator, m: &mut IntMatrix, ops: &mut Vec<Generator>| {
        *m = mul(&g.matrix(), m);
        ops.push(g);
    };
    while m[1][0] != 0 {
        if m[0][0] == 0 {
            push(Generator::R, &mut m, &mut ops);
            continue;
        }
        let (p, c) = (m[0][0], m[1][0]);
        let q = (c as f64 / p as f64).round() as i64;
        if q != 0 {
            push(Generator::Shear(-q), &mut m, &mut ops);
        }
        if m[1][0] != 0 {
            push(Generator::R, &mut m, &mut ops);
        }
    }
    if m[0][0] == -1 {
        push(Generator::R, &mut m, &mut ops);
        push(Generator::R, &mut m, &mut ops);
    }
    debug_assert_eq!((m[0][0], m[1][0], m[1][1]), (1, 0, 1));
    let mut word: Vec<Generator> = ops.iter().map(|g| g.inverse()).collect();
    let b = m[0][1];
    if b != 0 {
        word.extend([Generator::R, Generator::Shear(-b), Generator::RInv]);
    }
    word
}

/// The construction only exists up to the sign character (−1)^{…} on Aᵀk.
struct SignTwist;

#[derive(Debug, Clone)]
enum Factor {
    Fourier,
    InverseFourier,
    Diagonal(Vec<C64>),
}

/// Quantized cat map U_N kept in factored form (DFTs and diagonal chirps),
/// so U and U† act on vectors in O(N log N).
///
/// Generators quantize as R ↦ F (unitary DFT) and
/// L_c ↦ diag(e^{iπc j²/N}), or diag(e^{iπc j(j+N)/N}) when cN is odd.
/// The product satisfies U†T(k)U = T(Aᵀk) exactly; this is certified at
/// construction, and (map, N) pairs where only a sign-twisted version
/// exists are rejected.
#[derive(Debug, Clone)]
pub struct CatPropagator {
    plk: PlanckData,
    map: HyperbolicToralMap,
    factors: Vec<Factor>,
    phase: C64,
    dft: Dft,
}

impl CatPropagator {
    pub fn new(map: &HyperbolicToralMap, plk: PlanckData) -> Result<Self> {
        match Self::build(map, plk)? {
            Ok(u) => Ok(u),
            Err(SignTwist) => Err(Error::IncompatibleDimension {
                matrix: map.matrix(),
                n: plk.n(),
                admissible: admissible_parities(map).join(", "),
            }),
        }
    }

    fn build(
        map: &HyperbolicToralMap,
        plk: PlanckData,
    ) -> Result<std::result::Result<Self, SignTwist>> {
        if map.det() != 1 {
            return Err(Error::InvalidMap {
                matrix: map.matrix(),
                reason: "det = −1 is not symplectic and has no metaplectic quantization".into(),
            });
        }
        let n = plk.n();
        let roots = HalfRoots::new(n);
        let mut factors: Vec<Factor> = Vec::new();
        for g in decompose(map.matrix()) {
            match g {
                Generator::R => factors.push(Factor::Fourier),
                Generator::RInv => factors.push(Factor::InverseFourier),
                Generator::Shear(c) => {
                    let c = c as i128;
                    let odd = (c * n as i128) % 2 != 0;
                    let chirp: Vec<C64> = (0..n as i128)
                        .map(|j| {
                            let e = if odd {
                                c * j * (j + n as i128)
                            } else {
                                c * j * j
                            };
                            roots.get(e)
                        })
                        .collect();
                    if let Some(Factor::Diagonal(prev)) = factors.last_mut() {
                        prev.iter_mut().zip(&chirp).for_each(|(a, b)| *a *= b);
                    } else {
                        factors.push(Factor::Diagonal(chirp));
                    }
                }
            }
        }
        let mut u = Self {
            plk,
            map: map.clone(),
            factors,
            phase: C64::new(1.0, 0.0),
            dft: Dft::new(n),
        };
        let mut e0 = vec![C64::new(0.0, 0.0); n];
        e0[0] = C64::new(1.0, 0.0);
        u.apply(&mut e0);
        if e0[0].norm() > 1e-300 {
            u.phase = e0[0].conj() / e0[0].norm();
        }
        Ok(u.certify()?.map(|_| u))
    }

    pub fn plk(&self) -> PlanckData {
        self.plk
    }

    pub fn map(&self) -> &HyperbolicToralMap {
        &self.map
    }

    /// v ← U v
    pub fn apply(&self, v: &mut [C64]) {
        for f in self.factors.iter().rev() {
            match f {
                Factor::Fourier => self.dft.forward(v),
                Factor::InverseFourier => self.dft.inverse(v),
                Factor::Diagonal(d) => v.iter_mut().zip(d).for_each(|(x, y)| *x *= y),
            }
        }
        if self.phase != C64::new(1.0, 0.0) {
            v.iter_mut().for_each(|x| *x *= self.phase);
        }
    }

    /// v ← U† v
    pub fn apply_adjoint(&self, v: &mut [C64]) {
        for f in &self.factors {
            match f {
                Factor::Fourier => self.dft.inverse(v),
                Factor::InverseFourier => self.dft.forward(v),
                Factor::Diagonal(d) => v.iter_mut().zip(d).for_each(|(x, y)| *x *= y.conj()),
            }
        }
        if self.phase != C64::new(1.0, 0.0) {
            let c = self.phase.conj();
            v.iter_mut().for_each(|x| *x *= c);
        }
    }

    /// v ← Uᵗ v for any integer t.
    pub fn apply_power(&self, v: &mut [C64], t: i64) {
        for _ in 0..t.unsigned_abs() {
            if t > 0 {
                self.apply(v);
            } else {
                self.apply_adjoint(v);
            }
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.power_matrix(1)
    }

    /// Dense Uᵗ built column by column.
    pub fn power_matrix(&self, t: i64) -> ComplexMatrix {
        let n = self.plk.n();
        let mut m = ComplexMatrix::zeros(n, n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            self.apply_power(&mut col, t);
            m.set_column(j, &col);
        }
        m
    }

    pub fn operator(&self) -> TorusOperator {
        TorusOperator {
            plk: self.plk,
            matrix: self.matrix(),
            symbol: None,
        }
    }

    /// Checks U†T(eᵢ)U = T(Aᵀeᵢ) on a probe vector for both unit frequencies.
    /// The generated group is all of Heisenberg, so this fixes the character.
    fn certify(&self) -> Result<std::result::Result<(), SignTwist>> {
        let n = self.plk.n();
        let probe: Vec<C64> = (0..n)
            .map(|j| {
                let t = (j as f64 + 1.0) * 0.618_033_988_749_894_9;
                C64::new((t * 7.3).sin(), (t * 3.1).cos())
            })
            .collect();
        for k in [(1, 0), (0, 1)] {
            let lhs_op = SymbolAction::new(&TrigPolynomial::exponential(k), self.plk);
            let rhs_op = SymbolAction::new(
                &TrigPolynomial::exponential(self.map.transpose_apply(k)),
                self.plk,
            );
            let mut v = probe.clone();
            self.apply(&mut v);
            let mut v = lhs_op.apply(&v);
            self.apply_adjoint(&mut v);
            let w = rhs_op.apply(&probe);
            let ratio = vector::dot(&w, &v) / vector::dot(&w, &w);
            let residual =
                vector::max_abs_diff(&v, &w.iter().map(|x| x * ratio).collect::<Vec<_>>());
            if (ratio - 1.0).norm() < 1e-8 && residual < 1e-8 {
                continue;
            }
            if (ratio + 1.0).norm() < 1e-8 && residual < 1e-8 {
                return Ok(Err(SignTwist));
            }
            return Err(Error::InvalidArgument(format!(
                "propagator failed the Egorov certificate (ratio {ratio}, residual {residual:.3e})"
            )));
        }
        Ok(Ok(()))
    }
}

/// Dense U_N for the map.
pub fn cat_propagator(map: &HyperbolicToralMap, plk: PlanckData) -> Result<TorusOperator> {
    Ok(CatPropagator::new(map, plk)?.operator())
}

/// Parities of N for which the map has a sign-free quantization.
/// Even N always works; odd N is probed at N = 3, 5, 7.
pub fn admissible_parities(map: &HyperbolicToralMap) -> Vec<&'static str> {
    let mut out = vec!["even"];
    let odd_ok = [3usize, 5, 7].iter().all(|&n| {
        let plk = PlanckData::new(n).expect("n ≥ 2");
        matches!(CatPropagator::build(map, plk), Ok(Ok(_)))
    });
    if odd_ok {
        out.push("odd");
    }
    out
}

/// Upper bound on ‖U⁻ⁿ Op(a) Uⁿ − Op(a∘Aⁿ)‖, requiring degree(a∘Aⁿ) < N/2.
pub fn egorov_defect(
    a: &TrigPolynomial,
    n: usize,
    map: &HyperbolicToralMap,
    plk: PlanckData,
) -> Result<f64> {
    let half = plk.n() as f64 / 2.0;
    let composed = a.compose_power(map, n);
    if composed.degree() as f64 >= half {
        let mut cap = 0;
        while cap < n && (a.compose_power(map, cap + 1).degree() as f64) < half {
            cap += 1;
        }
        return Err(Error::EhrenfestCap {
            n,
            degree: composed.degree(),
            half,
            cap,
        });
    }
    if 2 * a.degree() >= plk.n() as i64 {
        return Err(Error::Aliasing {
            degree: a.degree(),
            half,
        });
    }
    egorov_defect_unbounded(a, n, map, plk)
}

/// Same defect with the aliasing cap lifted: both sides use the exact
/// translations T(k) for every k ∈ ℤ².
pub fn egorov_defect_unbounded(
    a: &TrigPolynomial,
    n: usize,
    map: &HyperbolicToralMap,
    plk: PlanckData,
) -> Result<f64> {
    let u = CatPropagator::new(map, plk)?;
    let dim = plk.n();
    let op = SymbolAction::new(a, plk);
    let mut lhs = ComplexMatrix::zeros(dim, dim);
    let mut col = vec![C64::new(0.0, 0.0); dim];
    for j in 0..dim {
        col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        col[j] = C64::new(1.0, 0.0);
        u.apply_power(&mut col, n as i64);
        let mut w = op.apply(&col);
        u.apply_power(&mut w, -(n as i64));
        lhs.set_column(j, &w);
    }
    let rhs = weyl_unbounded(&a.compose_power(map, n), plk).matrix;
    Ok(norm_upper_bound(&lhs.sub(&rhs)))
}
