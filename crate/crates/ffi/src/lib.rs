//! C ABI over the utility-duality library.
//!
//! Curves are opaque heap handles made by the `ud_curve_*` constructors and
//! released with [`ud_curve_free`]. Every fallible call returns a
//! [`UdStatus`]; after a failure [`ud_last_error`] describes it for the
//! calling thread. Outputs are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use utility_duality::delegation::update_target;
use utility_duality::selection::{allocation_sums, evaluate_matrix, find_pure_saddle, saddle_allocate};
use utility_duality::{Curve, Domain, Error, Evaluator};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter was rejected (bad shape, empty list, unsupported curve).
    InvalidArgument = 2,
    /// A point or curve lies outside the expected domain.
    DomainError = 3,
    /// Quadrature or root finding failed, or a target is unreachable.
    NumericFailure = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Opaque curve handle: a lottery CDF or a normalized utility.
pub struct UdCurve {
    inner: Curve,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UdDualityResult {
    pub expected_utility: f64,
    pub expected_disutility: f64,
    pub certain_equivalent: f64,
    pub aspiration_equivalent: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UdTargetUpdate {
    pub effective_gamma: f64,
    pub new_target: f64,
    pub old_exceed_prob: f64,
    pub new_exceed_prob: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UdSaddle {
    /// Whether `row`, `col` and `value` describe a pure saddle.
    pub has_saddle: bool,
    pub row: usize,
    pub col: usize,
    pub value: f64,
    pub maximin: f64,
    pub maximin_row: usize,
    pub minimax: f64,
    pub minimax_col: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UdAllocationPair {
    pub lottery: usize,
    pub utility: usize,
    pub eu: f64,
    pub ce: f64,
    pub ae: f64,
    /// Whether this stage was settled by a pure saddle.
    pub had_pure_saddle: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UdAllocationSums {
    pub sum_ce: f64,
    pub sum_ae: f64,
    pub sum_eu: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn core_status(e: &Error) -> UdStatus {
    match e {
        Error::OutsideDomain { .. } | Error::DomainMismatch { .. } => UdStatus::DomainError,
        Error::InvalidParameter(_)
        | Error::UnsupportedStep(_)
        | Error::Empty(_)
        | Error::IndexOutOfRange { .. }
        | Error::NotDominant
        | Error::NotNormalized { .. } => UdStatus::InvalidArgument,
        Error::Cell { source, .. } => core_status(source),
        _ => UdStatus::NumericFailure,
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `body`, records any failure, and converts it to a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> UdStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => UdStatus::Ok,
        Ok(Err(Failure::Null(arg))) => {
            set_error(format!("null pointer passed for `{arg}`"));
            UdStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(m))) => {
            set_error(m);
            UdStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            core_status(&e)
        }
        Err(payload) => {
            let m = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {m}"));
            UdStatus::Panic
        }
    }
}

unsafe fn curve_ref<'a>(p: *const UdCurve, name: &'static str) -> Result<&'a Curve, Failure> {
    p.as_ref().map(|c| &c.inner).ok_or(Failure::Null(name))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn curve_list(p: *const *const UdCurve, n: usize, name: &'static str) -> Result<Vec<(String, Curve)>, Failure> {
    if n == 0 {
        return Err(Failure::Invalid(format!("`{name}` must not be empty")));
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    std::slice::from_raw_parts(p, n)
        .iter()
        .enumerate()
        .map(|(i, &c)| Ok((format!("{name}[{i}]"), curve_ref(c, name)?.clone())))
        .collect()
}

unsafe fn make_curve(out: *mut *mut UdCurve, build: impl FnOnce() -> Result<Curve, Error>) -> UdStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let curve = build()?;
        out.write(Box::into_raw(Box::new(UdCurve { inner: curve })));
        Ok(())
    })
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ud_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null if the last
/// call succeeded. Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ud_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_uniform(lo: f64, hi: f64, out: *mut *mut UdCurve) -> UdStatus {
    make_curve(out, || Curve::uniform(Domain::new(lo, hi)?))
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_linear(lo: f64, hi: f64, out: *mut *mut UdCurve) -> UdStatus {
    make_curve(out, || Curve::linear(Domain::new(lo, hi)?))
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_triangular(lo: f64, hi: f64, mode: f64, out: *mut *mut UdCurve) -> UdStatus {
    make_curve(out, || Curve::triangular(Domain::new(lo, hi)?, mode))
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_scaled_beta(
    lo: f64,
    hi: f64,
    alpha: f64,
    beta: f64,
    out: *mut *mut UdCurve,
) -> UdStatus {
    make_curve(out, || Curve::scaled_beta(Domain::new(lo, hi)?, alpha, beta))
}

/// Normalized exponential utility with risk-aversion coefficient `gamma`
/// (nonzero; negative is risk seeking).
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_exponential(lo: f64, hi: f64, gamma: f64, out: *mut *mut UdCurve) -> UdStatus {
    make_curve(out, || Curve::exponential(Domain::new(lo, hi)?, gamma))
}

/// Normalized exponential utility with risk tolerance `rho = 1 / gamma`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_exponential_tolerance(
    lo: f64,
    hi: f64,
    rho: f64,
    out: *mut *mut UdCurve,
) -> UdStatus {
    make_curve(out, || Curve::exponential_with_tolerance(Domain::new(lo, hi)?, rho))
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_truncated_gaussian(
    lo: f64,
    hi: f64,
    mu: f64,
    sigma: f64,
    out: *mut *mut UdCurve,
) -> UdStatus {
    make_curve(out, || Curve::truncated_gaussian(Domain::new(lo, hi)?, mu, sigma))
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_log_wealth(lo: f64, hi: f64, wealth: f64, out: *mut *mut UdCurve) -> UdStatus {
    make_curve(out, || Curve::log_wealth(Domain::new(lo, hi)?, wealth))
}

/// Degenerate lottery (or threshold utility) jumping from 0 to 1 at `at`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_step(lo: f64, hi: f64, at: f64, out: *mut *mut UdCurve) -> UdStatus {
    make_curve(out, || Curve::step(Domain::new(lo, hi)?, at))
}

/// Piecewise-linear curve through `n` knots `(xs[i], ys[i])`.
///
/// # Safety
/// `xs` and `ys` must be null or valid for reading `n` doubles; `out` must
/// be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_piecewise_linear(
    lo: f64,
    hi: f64,
    xs: *const f64,
    ys: *const f64,
    n: usize,
    out: *mut *mut UdCurve,
) -> UdStatus {
    if n > 0 && (xs.is_null() || ys.is_null()) {
        return guard(|| Err(Failure::Null(if xs.is_null() { "xs" } else { "ys" })));
    }
    let knots: Vec<[f64; 2]> = if n == 0 {
        Vec::new()
    } else {
        let (xs, ys) = (std::slice::from_raw_parts(xs, n), std::slice::from_raw_parts(ys, n));
        xs.iter().zip(ys).map(|(&x, &y)| [x, y]).collect()
    };
    make_curve(out, || Curve::piecewise_linear(Domain::new(lo, hi)?, knots))
}

/// Releases a curve. Null is ignored.
///
/// # Safety
/// `curve` must be null or a handle from a `ud_curve_*` constructor that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_free(curve: *mut UdCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// # Safety
/// `curve` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_value(curve: *const UdCurve, x: f64, out: *mut f64) -> UdStatus {
    guard(|| {
        let v = curve_ref(curve, "curve")?.value(x)?;
        write_out(out, v, "out")
    })
}

/// Generalized inverse: the smallest `x` with `value(x) >= p`.
///
/// # Safety
/// `curve` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ud_curve_quantile(curve: *const UdCurve, p: f64, out: *mut f64) -> UdStatus {
    guard(|| {
        let v = curve_ref(curve, "curve")?.quantile(p)?;
        write_out(out, v, "out")
    })
}

/// EU, EDU, CE and AE of a lottery under a utility on the same domain.
///
/// # Safety
/// Handles must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ud_evaluate_pair(
    lottery: *const UdCurve,
    utility: *const UdCurve,
    out: *mut UdDualityResult,
) -> UdStatus {
    guard(|| {
        let r = Evaluator::default().evaluate_pair(curve_ref(lottery, "lottery")?, curve_ref(utility, "utility")?)?;
        let value = UdDualityResult {
            expected_utility: r.expected_utility,
            expected_disutility: r.expected_disutility,
            certain_equivalent: r.certain_equivalent,
            aspiration_equivalent: r.aspiration_equivalent,
        };
        write_out(out, value, "out")
    })
}

/// Risk-aversion coefficient whose exponential utility makes `target` the
/// lottery's aspiration equivalent. Zero means the linear utility.
///
/// # Safety
/// `lottery` must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ud_effective_gamma(lottery: *const UdCurve, target: f64, out: *mut f64) -> UdStatus {
    guard(|| {
        let g = Evaluator::default().effective_gamma(curve_ref(lottery, "lottery")?, target)?;
        write_out(out, g, "out")
    })
}

/// Carries a target from `old_lottery` to `new_lottery` at constant
/// effective risk aversion.
///
/// # Safety
/// Handles must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ud_update_target(
    old_lottery: *const UdCurve,
    old_target: f64,
    new_lottery: *const UdCurve,
    out: *mut UdTargetUpdate,
) -> UdStatus {
    guard(|| {
        let up = update_target(
            &Evaluator::default(),
            curve_ref(old_lottery, "old_lottery")?,
            old_target,
            curve_ref(new_lottery, "new_lottery")?,
        )?;
        let value = UdTargetUpdate {
            effective_gamma: up.effective_gamma,
            new_target: up.new_target,
            old_exceed_prob: up.old_exceed_prob,
            new_exceed_prob: up.new_exceed_prob,
        };
        write_out(out, value, "out")
    })
}

/// Pure saddle of a row-major `rows x cols` matrix (rows maximize,
/// columns minimize), with maximin and minimax.
///
/// # Safety
/// `values` must be null or valid for reading `rows * cols` doubles; `out`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn ud_find_pure_saddle(
    values: *const f64,
    rows: usize,
    cols: usize,
    out: *mut UdSaddle,
) -> UdStatus {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure::Invalid("matrix size overflows".into()))?;
        if len == 0 {
            return Err(Error::Empty("matrix").into());
        }
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        let flat = std::slice::from_raw_parts(values, len);
        let matrix: Vec<Vec<f64>> = flat.chunks(cols).map(<[f64]>::to_vec).collect();
        let r = find_pure_saddle(&matrix)?;
        let mut value = UdSaddle {
            maximin: r.maximin,
            maximin_row: r.maximin_row,
            minimax: r.minimax,
            minimax_col: r.minimax_col,
            ..UdSaddle::default()
        };
        if let Some(s) = r.saddle {
            value.has_saddle = true;
            value.row = s.row;
            value.col = s.col;
            value.value = s.value;
        }
        write_out(out, value, "out")
    })
}

/// Stage-by-stage saddle allocation of `n` lotteries to `n` utilities.
/// Writes `n` pairs in stage order to `pairs` and the totals to `sums`
/// (which may be null).
///
/// # Safety
/// `lotteries` and `utilities` must be null or valid for reading `n` live
/// handles; `pairs` null or writable for `n` elements; `sums` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ud_allocate(
    lotteries: *const *const UdCurve,
    utilities: *const *const UdCurve,
    n: usize,
    pairs: *mut UdAllocationPair,
    sums: *mut UdAllocationSums,
) -> UdStatus {
    guard(|| {
        let ls = curve_list(lotteries, n, "lotteries")?;
        let us = curve_list(utilities, n, "utilities")?;
        if pairs.is_null() {
            return Err(Failure::Null("pairs"));
        }
        let matrix = evaluate_matrix(&Evaluator::default(), &ls, &us)?;
        let allocation = saddle_allocate(&matrix)?;
        let totals = allocation_sums(&allocation, &matrix)?;
        let out = std::slice::from_raw_parts_mut(pairs, n);
        for ((slot, p), stage) in out.iter_mut().zip(&allocation.pairs).zip(&allocation.stage_diagnostics) {
            *slot = UdAllocationPair {
                lottery: p.lottery,
                utility: p.utility,
                eu: p.eu,
                ce: matrix.ce[p.lottery][p.utility],
                ae: matrix.ae[p.lottery][p.utility],
                had_pure_saddle: stage.had_pure_saddle,
            };
        }
        if !sums.is_null() {
            sums.write(UdAllocationSums {
                sum_ce: totals.sum_ce,
                sum_ae: totals.sum_ae,
                sum_eu: totals.sum_eu,
            });
        }
        Ok(())
    })
}
