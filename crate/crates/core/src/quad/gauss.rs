//! Fixed Gauss rules.

use crate::scalar::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on the
/// three-term recurrence).
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0);
    let mut x = vec![0.0_f64; n];
    let mut w = vec![0.0_f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, 0.0_f64);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x.into_iter().map(T::lit).collect(), w.into_iter().map(T::lit).collect())
}

/// 21-point Kronrod abscissae (nonnegative half, descending).
pub(crate) const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

pub(crate) const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_067_125_948,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 10-point Gauss weights for the odd-indexed entries of `XGK21`.
pub(crate) const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_146,
];

/// One Gauss–Kronrod 21 panel.
#[derive(Clone, Copy, Debug)]
pub struct GkPanel<T: Real> {
    pub value: T,
    pub err: T,
    pub abs_value: T,
    /// Kronrod integral of the auxiliary (error) channel.
    pub aux: T,
}

/// Applies the G10/K21 pair on `[a, b]` to an integrand returning
/// `(value, auxiliary)`. The error estimate follows the usual QUADPACK
/// heuristic.
pub fn gk21<T: Real, F: FnMut(T) -> (T, T)>(f: &mut F, a: T, b: T) -> GkPanel<T> {
    let half = T::lit(0.5);
    let c = half * (a + b);
    let h = half * (b - a);
    let dh = h.abs();
    let (fc, ac) = f(c);
    let mut resk = fc * T::lit(WGK21[10]);
    let mut resg = T::zero();
    let mut resabs = fc.abs() * T::lit(WGK21[10]);
    let mut aux = ac * T::lit(WGK21[10]);
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = h * T::lit(XGK21[j]);
        let (f1, a1) = f(c - dx);
        let (f2, a2) = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = T::lit(WGK21[j]);
        resk = resk + wk * (f1 + f2);
        resabs = resabs + wk * (f1.abs() + f2.abs());
        aux = aux + wk * (a1 + a2);
        if j % 2 == 1 {
            resg = resg + T::lit(WG10[j / 2]) * (f1 + f2);
        }
    }
    let reskh = resk * half;
    let mut resasc = T::lit(WGK21[10]) * (fc - reskh).abs();
    for j in 0..10 {
        resasc = resasc + T::lit(WGK21[j]) * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * h;
    let resabs = resabs * dh;
    let resasc = resasc * dh;
    let mut err = ((resk - resg) * h).abs();
    if resasc != T::zero() && err != T::zero() {
        let r = (T::lit(200.0) * err / resasc).powf(T::lit(1.5));
        err = resasc * if r < T::one() { r } else { T::one() };
    }
    let eps50 = T::lit(50.0) * T::epsilon();
    if resabs > T::min_positive_value() / eps50 {
        err = err.max(eps50 * resabs);
    }
    if !err.is_finite() {
        err = T::infinity();
    }
    GkPanel { value, err, abs_value: resabs, aux: (aux * h).abs() }
}
