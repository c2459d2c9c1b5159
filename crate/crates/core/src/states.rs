//! Fixture states, one-parameter families and seeded random generators.
//!
//! Random generators draw from ChaCha20 with a fixed stream id per
//! generator, and Gaussians come from Box-Muller on 53-bit uniforms, so a
//! given [`Seed`] yields bit-identical states on every platform.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, pure_state, vec_norm, ComplexMatrix, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent child seed; used to give each sample of a sweep its own seed.
    pub fn child(self, k: u64) -> Seed {
        // splitmix64 finalizer
        let mut z = self.0 ^ k.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        Seed(z ^ (z >> 31))
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub mod stream {
    pub const PURE: u64 = 1;
    pub const DENSITY: u64 = 2;
    pub const SEPARABLE: u64 = 3;
    pub const UNITARY: u64 = 4;
    pub const MATRIX: u64 = 5;
    pub const PARAMS: u64 = 6;
    pub const OPTIMIZER: u64 = 0x100;
}

/// Seeded random source on a named ChaCha20 stream.
pub struct StreamRng {
    inner: ChaCha20Rng,
    spare: Option<f64>,
}

impl StreamRng {
    pub fn new(seed: Seed, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed.0);
        inner.set_stream(stream);
        Self { inner, spare: None }
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let theta = TAU * self.uniform();
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Standard complex normal, `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.gaussian(), self.gaussian()) * FRAC_1_SQRT_2
    }

    pub fn exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }

    pub fn unit_vector(&mut self, dim: usize) -> Vec<Complex64> {
        let v: Vec<Complex64> = (0..dim).map(|_| self.complex_gaussian()).collect();
        let n = vec_norm(&v);
        v.into_iter().map(|z| z / n).collect()
    }

    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    /// Haar unitary from Gram-Schmidt on Gaussian columns.
    pub fn unitary(&mut self, dim: usize) -> ComplexMatrix {
        let g = self.complex_matrix(dim, dim);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut v: Vec<Complex64> = (0..dim).map(|i| g[(i, j)]).collect();
            // two passes keep the columns orthogonal to machine precision
            for _ in 0..2 {
                for u in &cols {
                    let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, y) in v.iter_mut().zip(u) {
                        *x -= proj * y;
                    }
                }
            }
            let n = vec_norm(&v);
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
        ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
    }

    /// Uniform weights on the probability simplex.
    pub fn dirichlet(&mut self, k: usize) -> Vec<f64> {
        let e: Vec<f64> = (0..k).map(|_| self.exponential()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|x| x / s).collect()
    }
}

/// Haar-random pure state on `prod(dims)`.
pub fn random_pure(dims: &[usize], seed: Seed) -> Vec<Complex64> {
    StreamRng::new(seed, stream::PURE).unit_vector(dims.iter().product())
}

/// `G G^H / Tr(G G^H)` with `G` a `D x rank` complex Gaussian matrix.
pub fn random_density(dims: &[usize], rank: usize, seed: Seed) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    let mut rng = StreamRng::new(seed, stream::DENSITY);
    let g = rng.complex_matrix(d, rank);
    let gg = g.matmul(&g.adjoint()).hermitian_part();
    let tr = gg.trace().re;
    DensityMatrix::new(dims.to_vec(), gg.scale(1.0 / tr))
}

/// Product of Haar-random local pure states, as a state vector.
pub fn random_product_vector(rng: &mut StreamRng, dims: &[usize]) -> Vec<Complex64> {
    dims.iter()
        .map(|&d| rng.unit_vector(d))
        .fold(vec![Complex64::new(1.0, 0.0)], |acc, v| kron_vec(&acc, &v))
}

/// Convex mixture of `terms` random product pure states with Dirichlet weights.
pub fn random_separable(dims: &[usize], terms: usize, seed: Seed) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::BadParams("random_separable needs at least one term".into()));
    }
    let mut rng = StreamRng::new(seed, stream::SEPARABLE);
    let weights = rng.dirichlet(terms);
    let d: usize = dims.iter().product();
    let mut acc = ComplexMatrix::zeros(d, d);
    for w in weights {
        let v = random_product_vector(&mut rng, dims);
        acc = &acc + &ComplexMatrix::projector(&v).scale(w);
    }
    DensityMatrix::new(dims.to_vec(), acc.hermitian_part())
}

pub fn random_unitary(dim: usize, seed: Seed) -> ComplexMatrix {
    StreamRng::new(seed, stream::UNITARY).unitary(dim)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn basis(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![re(0.0); dim];
    v[k] = re(1.0);
    v
}

/// `|Phi+> = sum_i |ii> / sqrt(d)`.
pub fn bell(d: usize) -> DensityMatrix {
    let mut v = vec![re(0.0); d * d];
    for i in 0..d {
        v[i * d + i] = re(1.0 / (d as f64).sqrt());
    }
    DensityMatrix::new_unchecked(vec![d, d], ComplexMatrix::projector(&v))
}

/// Horodecki's 2x4 bound entangled state with parameter `b` in (0, 1).
pub fn horodecki_2x4(b: f64) -> Result<DensityMatrix> {
    let s = (1.0 - b * b).sqrt() / 2.0;
    let h = (1.0 + b) / 2.0;
    let mut m = vec![vec![0.0; 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = b;
    }
    m[4][4] = h;
    m[7][7] = h;
    m[4][7] = s;
    m[7][4] = s;
    for (i, j) in [(0, 5), (1, 6), (2, 7)] {
        m[i][j] = b;
        m[j][i] = b;
    }
    let mat = ComplexMatrix::from_real_rows(&m)?.scale(1.0 / (1.0 + 7.0 * b));
    DensityMatrix::new(vec![2, 4], mat)
}

/// `x |xi><xi| + (1 - x) rho_d` with `|xi> = (|00> + |11>)/sqrt(2)` in 2x4.
pub fn example1(x: f64, d: f64) -> Result<DensityMatrix> {
    let mut xi = vec![re(0.0); 8];
    xi[0] = re(FRAC_1_SQRT_2);
    xi[5] = re(FRAC_1_SQRT_2);
    let pure = ComplexMatrix::projector(&xi);
    let rho_d = horodecki_2x4(d)?;
    DensityMatrix::new(vec![2, 4], &pure.scale(x) + &rho_d.matrix().scale(1.0 - x))
}

/// Horodecki's 3x3 bound entangled state with parameter `t` in [0, 1].
pub fn horodecki_3x3(t: f64) -> Result<DensityMatrix> {
    let s = (1.0 - t * t).sqrt() / 2.0;
    let h = (1.0 + t) / 2.0;
    let mut m = vec![vec![0.0; 9]; 9];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = t;
    }
    for (i, j) in [(0, 4), (0, 8), (4, 8)] {
        m[i][j] = t;
        m[j][i] = t;
    }
    m[6][6] = h;
    m[8][8] = h;
    m[6][8] = s;
    m[8][6] = s;
    let mat = ComplexMatrix::from_real_rows(&m)?.scale(1.0 / (1.0 + 8.0 * t));
    DensityMatrix::new(vec![3, 3], mat)
}

fn white_noise_mix(dims: Vec<usize>, noise: f64, state: &ComplexMatrix) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    let mat = &ComplexMatrix::identity(d).scale(noise / d as f64) + &state.scale(1.0 - noise);
    DensityMatrix::new(dims, mat)
}

/// `(1 - p)/9 I + p rho_t`.
pub fn example2(p: f64, t: f64) -> Result<DensityMatrix> {
    white_noise_mix(vec![3, 3], 1.0 - p, horodecki_3x3(t)?.matrix())
}

/// The five product vectors of the 3x3 tiles unextendible product basis.
pub fn tiles_basis() -> [Vec<Complex64>; 5] {
    let e = |k| basis(3, k);
    let diff = |a: usize, b: usize| -> Vec<Complex64> {
        e(a).iter().zip(e(b)).map(|(x, y)| (x - y) * FRAC_1_SQRT_2).collect()
    };
    let uniform = vec![re(1.0 / 3f64.sqrt()); 3];
    [
        kron_vec(&e(0), &diff(0, 1)),
        kron_vec(&diff(0, 1), &e(2)),
        kron_vec(&e(2), &diff(1, 2)),
        kron_vec(&diff(1, 2), &e(0)),
        kron_vec(&uniform, &uniform),
    ]
}

/// `(I - sum_i |phi_i><phi_i|) / 4` for the tiles basis.
pub fn tiles() -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::identity(9);
    for v in tiles_basis() {
        m = &m - &ComplexMatrix::projector(&v);
    }
    DensityMatrix::new(vec![3, 3], m.scale(0.25).hermitian_part())
}

/// `(1 - t)/9 I + t rho_tiles`.
pub fn tiles_noise(t: f64) -> Result<DensityMatrix> {
    white_noise_mix(vec![3, 3], 1.0 - t, tiles()?.matrix())
}

/// The six-term qutrit W-type vector on 3x3x3.
pub fn w_vector() -> Vec<Complex64> {
    let mut v = vec![re(0.0); 27];
    for (a, b, c) in [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 2), (1, 2, 1), (2, 1, 1)] {
        v[9 * a + 3 * b + c] = re(1.0 / 6f64.sqrt());
    }
    v
}

/// `(1 - q)/27 I + q |W><W|`.
pub fn w_noise(q: f64) -> Result<DensityMatrix> {
    white_noise_mix(vec![3, 3, 3], 1.0 - q, &ComplexMatrix::projector(&w_vector()))
}

pub fn ghz_vector(parties: usize) -> Vec<Complex64> {
    let d = 1 << parties;
    let mut v = vec![re(0.0); d];
    v[0] = re(FRAC_1_SQRT_2);
    v[d - 1] = re(FRAC_1_SQRT_2);
    v
}

/// `x/8 I + (1 - x) |GHZ><GHZ|` on three qubits.
pub fn ghz_noise(x: f64) -> Result<DensityMatrix> {
    white_noise_mix(vec![2, 2, 2], x, &ComplexMatrix::projector(&ghz_vector(3)))
}

struct ParamSpec {
    name: &'static str,
    lo: f64,
    hi: f64,
    default: Option<f64>,
    open: bool,
}

const fn param(name: &'static str, lo: f64, hi: f64, default: Option<f64>) -> ParamSpec {
    ParamSpec { name, lo, hi, default, open: false }
}

struct Entry {
    name: &'static str,
    dims: &'static [usize],
    params: &'static [ParamSpec],
}

const UNIT_OPEN: ParamSpec = ParamSpec { name: "d", lo: 0.0, hi: 1.0, default: Some(0.9), open: true };

const REGISTRY: &[Entry] = &[
    Entry { name: "bell", dims: &[], params: &[param("d", 2.0, 64.0, Some(2.0))] },
    Entry { name: "horodecki_2x4", dims: &[2, 4], params: &[UNIT_OPEN] },
    Entry { name: "example1", dims: &[2, 4], params: &[param("x", 0.0, 1.0, None), UNIT_OPEN] },
    Entry { name: "horodecki_3x3", dims: &[3, 3], params: &[param("t", 0.0, 1.0, None)] },
    Entry {
        name: "example2",
        dims: &[3, 3],
        params: &[param("p", 0.0, 1.0, None), param("t", 0.0, 1.0, None)],
    },
    Entry { name: "tiles", dims: &[3, 3], params: &[] },
    Entry { name: "tiles_noise", dims: &[3, 3], params: &[param("t", 0.0, 1.0, None)] },
    Entry { name: "w_noise", dims: &[3, 3, 3], params: &[param("q", 0.0, 1.0, None)] },
    Entry { name: "ghz_noise", dims: &[2, 2, 2], params: &[param("x", 0.0, 1.0, None)] },
];

/// Names accepted by [`builtin_state`].
pub fn builtin_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.name).collect()
}

fn lookup(name: &str) -> Result<&'static Entry> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownState(name.to_string()))
}

fn resolve_params(entry: &Entry, given: &[f64]) -> Result<Vec<f64>> {
    if given.len() > entry.params.len() {
        return Err(Error::BadParams(format!(
            "'{}' takes at most {} parameters, got {}",
            entry.name,
            entry.params.len(),
            given.len()
        )));
    }
    entry
        .params
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let v = match given.get(k) {
                Some(&v) => v,
                None => spec.default.ok_or_else(|| {
                    Error::BadParams(format!("'{}' requires parameter '{}'", entry.name, spec.name))
                })?,
            };
            let inside = if spec.open {
                v > spec.lo && v < spec.hi
            } else {
                v >= spec.lo && v <= spec.hi
            };
            if !inside || !v.is_finite() {
                return Err(Error::ParamOutOfRange {
                    name: format!("{}.{}", entry.name, spec.name),
                    value: v,
                    lo: spec.lo,
                    hi: spec.hi,
                });
            }
            Ok(v)
        })
        .collect()
}

/// Constructs a named fixture state. Every result passes [`DensityMatrix::new`].
pub fn builtin_state(name: &str, params: &[f64]) -> Result<DensityMatrix> {
    let entry = lookup(name)?;
    let p = resolve_params(entry, params)?;
    match entry.name {
        "bell" => {
            if p[0].fract() != 0.0 {
                return Err(Error::BadParams("bell dimension must be an integer".into()));
            }
            let rho = bell(p[0] as usize);
            DensityMatrix::new(rho.dims().to_vec(), rho.into_matrix())
        }
        "horodecki_2x4" => horodecki_2x4(p[0]),
        "example1" => example1(p[0], p[1]),
        "horodecki_3x3" => horodecki_3x3(p[0]),
        "example2" => example2(p[0], p[1]),
        "tiles" => tiles(),
        "tiles_noise" => tiles_noise(p[0]),
        "w_noise" => w_noise(p[0]),
        "ghz_noise" => ghz_noise(p[0]),
        _ => unreachable!("registry entry without constructor"),
    }
}

/// Splits `name(a, b, ...)` into the name and its numeric arguments.
pub fn parse_call(spec: &str) -> Result<(String, Vec<f64>)> {
    let spec = spec.trim();
    let Some(open) = spec.find('(') else {
        return Ok((spec.to_string(), Vec::new()));
    };
    let close = spec
        .strip_suffix(')')
        .ok_or_else(|| Error::BadParams(format!("missing ')' in '{spec}'")))?;
    let name = spec[..open].trim().to_string();
    let inner = &close[open + 1..];
    let args = inner
        .split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::BadParams(format!("bad number '{s}' in '{spec}'"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((name, args))
}

/// Parses and builds a state from `name(params)` syntax, e.g. `example1(0.5)`.
pub fn builtin_from_spec(spec: &str) -> Result<DensityMatrix> {
    let (name, args) = parse_call(spec)?;
    builtin_state(&name, &args)
}

pub type Generator = Arc<dyn Fn(f64) -> Result<DensityMatrix> + Send + Sync>;

/// A one-parameter family of states.
#[derive(Clone)]
pub struct StateFamily {
    pub name: String,
    pub dims: Vec<usize>,
    pub param_range: (f64, f64),
    generator: Generator,
}

impl fmt::Debug for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateFamily")
            .field("name", &self.name)
            .field("dims", &self.dims)
            .field("param_range", &self.param_range)
            .finish()
    }
}

impl StateFamily {
    pub fn new(
        name: impl Into<String>,
        dims: Vec<usize>,
        param_range: (f64, f64),
        generator: impl Fn(f64) -> Result<DensityMatrix> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), dims, param_range, generator: Arc::new(generator) }
    }

    /// Family over the first parameter of a builtin, with the remaining
    /// parameters fixed to `fixed` (or their defaults).
    pub fn builtin(name: &str, fixed: &[f64]) -> Result<Self> {
        let entry = lookup(name)?;
        let first = entry
            .params
            .first()
            .filter(|_| entry.name != "bell")
            .ok_or_else(|| Error::BadFamily(format!("'{name}' has no continuous parameter")))?;
        // validate the fixed part once, at a representative point
        let probe: Vec<f64> = std::iter::once(first.default.unwrap_or(first.lo)).chain(fixed.iter().copied()).collect();
        let mut full = resolve_params(entry, &probe)?;
        let label = if fixed.is_empty() {
            name.to_string()
        } else {
            let f: Vec<String> = fixed.iter().map(|v| v.to_string()).collect();
            format!("{name}({})", f.join(","))
        };
        let name_owned = entry.name;
        full.remove(0);
        Ok(Self::new(label, entry.dims.to_vec(), (first.lo, first.hi), move |t| {
            let args: Vec<f64> = std::iter::once(t).chain(full.iter().copied()).collect();
            builtin_state(name_owned, &args)
        }))
    }

    /// Parses `name` or `name(fixed, ...)`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (name, fixed) = parse_call(spec)?;
        Self::builtin(&name, &fixed)
    }

    pub fn state(&self, t: f64) -> Result<DensityMatrix> {
        let (lo, hi) = self.param_range;
        if !(t >= lo && t <= hi) {
            return Err(Error::ParamOutOfRange { name: self.name.clone(), value: t, lo, hi });
        }
        (self.generator)(t)
    }
}

/// Pure state `|psi><psi|` on `dims`; validates normalization.
pub fn pure(dims: &[usize], psi: &[Complex64]) -> Result<DensityMatrix> {
    pure_state(dims.to_vec(), psi)
}
