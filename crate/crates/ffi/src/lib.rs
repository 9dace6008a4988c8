//! C ABI for the poverty-trap library.
//!
//! Models and schemes are opaque heap handles created by `pt_*_new` style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`PtStatus`]; on failure a description is available from
//! [`pt_last_error_message`] on the same thread. Results are written through
//! out-pointers, which are left untouched on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use poverty_trap::barrier::Matching;
use poverty_trap::error::Error;
use poverty_trap::model::{ModelParams, PremiumMapping, SchemeSpec};
use poverty_trap::optimize::{
    evaluate, optimal_barrier, optimal_theta, Quantity, RootConfig, SweepContext, Verdict,
};
use poverty_trap::welfare::{SubsidyRateMode, WelfareParams};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    /// Initial capital below the critical capital of the scheme.
    InvalidCapital = 3,
    /// Argument outside the domain of a formula.
    Domain = 4,
    NonConvergence = 5,
    /// Pole, divergence or integer-parameter case of a special function.
    SpecialFunction = 6,
    SingularMatching = 7,
    /// The root finder could not bracket or found a non-monotone objective.
    RootFailure = 8,
    Unsupported = 9,
    /// A Rust panic was caught at the boundary.
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtPremiumMapping {
    DriftAbsorption = 0,
    RateScaling = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtMatching {
    FluxContinuity = 0,
    SmoothPasting = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtSubsidyRateMode {
    PaperLiteral = 0,
    Dimensional = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtVerdict {
    Root = 0,
    AllSubsidyInsufficient = 1,
    NoSubsidyNeeded = 2,
    NoBarrierNeeded = 3,
    BarrierInsufficient = 4,
}

/// Settings shared by the evaluation calls. Passing NULL uses [`pt_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtOptions {
    /// Discount rate of the subsidy value.
    pub delta: f64,
    /// Cost of lifting a trapped household out of poverty.
    pub m_cost: f64,
    pub subsidy_rate_mode: PtSubsidyRateMode,
    pub matching: PtMatching,
}

/// Opaque model parameters.
pub struct PtModel(ModelParams);

/// Opaque protection scheme.
pub struct PtScheme(SchemeSpec);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PtStatus {
    match e {
        Error::NonConvergence { .. } => PtStatus::NonConvergence,
        Error::PoleAtC { .. }
        | Error::DivergentAtZero { .. }
        | Error::IntegerC { .. }
        | Error::DivergentIntegral { .. }
        | Error::PoleAtNonPositiveInteger { .. } => PtStatus::SpecialFunction,
        Error::Domain(_) => PtStatus::Domain,
        Error::InvalidParameter(_) => PtStatus::InvalidParameter,
        Error::InvalidInitialCapital { .. } => PtStatus::InvalidCapital,
        Error::SingularMatching { .. } => PtStatus::SingularMatching,
        Error::BracketFailure(_) | Error::MonotonicityViolation { .. } => PtStatus::RootFailure,
        Error::Unsupported(_) => PtStatus::Unsupported,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Run `f`, translating errors and panics into a status and the last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PtStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(&format!("null pointer passed as {what}"));
            PtStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(&format!("{}: {e}", e.kind()));
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            PtStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

fn mapping(m: PtPremiumMapping) -> PremiumMapping {
    match m {
        PtPremiumMapping::DriftAbsorption => PremiumMapping::DriftAbsorption,
        PtPremiumMapping::RateScaling => PremiumMapping::RateScaling,
    }
}

fn verdict(v: Verdict) -> PtVerdict {
    match v {
        Verdict::Root => PtVerdict::Root,
        Verdict::AllSubsidyInsufficient => PtVerdict::AllSubsidyInsufficient,
        Verdict::NoSubsidyNeeded => PtVerdict::NoSubsidyNeeded,
        Verdict::NoBarrierNeeded => PtVerdict::NoBarrierNeeded,
        Verdict::BarrierInsufficient => PtVerdict::BarrierInsufficient,
    }
}

unsafe fn context(opts: *const PtOptions) -> SweepContext {
    let o = opts.as_ref().copied().unwrap_or_else(|| pt_options_default());
    let matching = match o.matching {
        PtMatching::FluxContinuity => Matching::FluxContinuity,
        PtMatching::SmoothPasting => Matching::SmoothPasting,
    };
    SweepContext {
        welfare: WelfareParams {
            delta: o.delta,
            m_cost: o.m_cost,
            subsidy_rate_mode: match o.subsidy_rate_mode {
                PtSubsidyRateMode::PaperLiteral => SubsidyRateMode::PaperLiteral,
                PtSubsidyRateMode::Dimensional => SubsidyRateMode::Dimensional,
            },
            matching,
        },
        matching,
        ..SweepContext::default()
    }
}

unsafe fn eval(
    model: *const PtModel,
    scheme: *const PtScheme,
    x: f64,
    quantity: Quantity,
    opts: *const PtOptions,
    out: *mut f64,
) -> PtStatus {
    guard(|| {
        let m = get(model, "model")?;
        let s = get(scheme, "scheme")?;
        let v = evaluate(&m.0, &s.0, x, quantity, &context(opts))?;
        put(out, v, "out")
    })
}

fn boxed<T>(v: T, out: *mut *mut T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    unsafe { out.write(Box::into_raw(Box::new(v))) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code, e.g. `"InvalidParameter"`.
#[no_mangle]
pub extern "C" fn pt_status_name(status: PtStatus) -> *const c_char {
    let s: &'static str = match status {
        PtStatus::Ok => "Ok\0",
        PtStatus::NullPointer => "NullPointer\0",
        PtStatus::InvalidParameter => "InvalidParameter\0",
        PtStatus::InvalidCapital => "InvalidCapital\0",
        PtStatus::Domain => "Domain\0",
        PtStatus::NonConvergence => "NonConvergence\0",
        PtStatus::SpecialFunction => "SpecialFunction\0",
        PtStatus::SingularMatching => "SingularMatching\0",
        PtStatus::RootFailure => "RootFailure\0",
        PtStatus::Unsupported => "Unsupported\0",
        PtStatus::Panic => "Panic\0",
    };
    s.as_ptr().cast()
}

/// Default options: discount 0.9, trapping cost 8, literal subsidy rate, flux continuity.
#[no_mangle]
pub extern "C" fn pt_options_default() -> PtOptions {
    let w = WelfareParams::default();
    PtOptions {
        delta: w.delta,
        m_cost: w.m_cost,
        subsidy_rate_mode: PtSubsidyRateMode::PaperLiteral,
        matching: PtMatching::FluxContinuity,
    }
}

/// # Safety
/// `out` must be a valid pointer to a `PtModel*`.
#[no_mangle]
pub unsafe extern "C" fn pt_model_new(
    r: f64,
    lambda: f64,
    alpha: f64,
    x_star: f64,
    out: *mut *mut PtModel,
) -> PtStatus {
    guard(|| boxed(PtModel(ModelParams::new(r, lambda, alpha, x_star)?), out))
}

/// # Safety
/// `model` must be NULL or a handle from `pt_model_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_model_free(model: *mut PtModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live model handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pt_scheme_uninsured(
    model: *const PtModel,
    out: *mut *mut PtScheme,
) -> PtStatus {
    guard(|| {
        let m = get(model, "model")?;
        boxed(PtScheme(SchemeSpec::uninsured(&m.0)), out)
    })
}

/// # Safety
/// `model` must be a live model handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pt_scheme_insured(
    model: *const PtModel,
    kappa: f64,
    theta: f64,
    premium_mapping: PtPremiumMapping,
    out: *mut *mut PtScheme,
) -> PtStatus {
    guard(|| {
        let m = get(model, "model")?;
        let s = SchemeSpec::insured(&m.0, kappa, theta, mapping(premium_mapping))?;
        boxed(PtScheme(s), out)
    })
}

/// Insured scheme whose loading is cut from `theta` to `theta_star` by a government subsidy.
///
/// # Safety
/// `model` must be a live model handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pt_scheme_subsidised(
    model: *const PtModel,
    kappa: f64,
    theta: f64,
    theta_star: f64,
    premium_mapping: PtPremiumMapping,
    out: *mut *mut PtScheme,
) -> PtStatus {
    guard(|| {
        let m = get(model, "model")?;
        let s = SchemeSpec::subsidised(&m.0, kappa, theta, theta_star, mapping(premium_mapping))?;
        boxed(PtScheme(s), out)
    })
}

/// Scheme whose premium is paid by the government while capital is below `barrier`.
///
/// # Safety
/// `model` must be a live model handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pt_scheme_barrier(
    model: *const PtModel,
    kappa: f64,
    theta: f64,
    barrier: f64,
    premium_mapping: PtPremiumMapping,
    out: *mut *mut PtScheme,
) -> PtStatus {
    guard(|| {
        let m = get(model, "model")?;
        let s = SchemeSpec::barrier(&m.0, kappa, theta, barrier, mapping(premium_mapping))?;
        boxed(PtScheme(s), out)
    })
}

/// Replace the insured growth rate and critical capital of a scheme.
///
/// # Safety
/// `scheme` and `model` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn pt_scheme_set_insured_dynamics(
    scheme: *mut PtScheme,
    model: *const PtModel,
    r_ins: f64,
    x_star_ins: f64,
) -> PtStatus {
    guard(|| {
        let m = get(model, "model")?;
        let s = scheme.as_mut().ok_or(Fail::Null("scheme"))?;
        s.0 = s.0.with_insured_dynamics(&m.0, r_ins, x_star_ins)?;
        Ok(())
    })
}

/// Critical capital below which the household is trapped under this scheme.
///
/// # Safety
/// `scheme` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pt_scheme_critical_capital(scheme: *const PtScheme, out: *mut f64) -> PtStatus {
    guard(|| put(out, get(scheme, "scheme")?.0.critical_capital(), "out"))
}

/// # Safety
/// `scheme` must be NULL or a handle from a `pt_scheme_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_scheme_free(scheme: *mut PtScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// Infinite-horizon trapping probability from capital `x`.
///
/// # Safety
/// Handles must be live; `opts` may be NULL; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pt_trapping_probability(
    model: *const PtModel,
    scheme: *const PtScheme,
    x: f64,
    opts: *const PtOptions,
    out: *mut f64,
) -> PtStatus {
    eval(model, scheme, x, Quantity::TrappingProbability, opts, out)
}

/// Laplace transform of the trapping time at rate `delta` (`delta = 0` gives the probability).
///
/// # Safety
/// Handles must be live; `opts` may be NULL; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pt_laplace_trapping(
    model: *const PtModel,
    scheme: *const PtScheme,
    x: f64,
    delta: f64,
    opts: *const PtOptions,
    out: *mut f64,
) -> PtStatus {
    eval(model, scheme, x, Quantity::Laplace { delta }, opts, out)
}

/// `E[tau 1{tau < inf}]`. An integer `lambda / r` is handled by averaging nearby rates.
///
/// # Safety
/// Handles must be live; `opts` may be NULL; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pt_expected_trapping_time(
    model: *const PtModel,
    scheme: *const PtScheme,
    x: f64,
    opts: *const PtOptions,
    out: *mut f64,
) -> PtStatus {
    eval(model, scheme, x, Quantity::ExpectedTime, opts, out)
}

/// Present value of government subsidies, discounted at `opts->delta`.
///
/// # Safety
/// Handles must be live; `opts` may be NULL; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pt_subsidy_value(
    model: *const PtModel,
    scheme: *const PtScheme,
    x: f64,
    opts: *const PtOptions,
    out: *mut f64,
) -> PtStatus {
    eval(model, scheme, x, Quantity::SubsidyValue, opts, out)
}

/// Subsidy value plus `opts->m_cost` times the trapping probability.
///
/// # Safety
/// Handles must be live; `opts` may be NULL; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pt_cost(
    model: *const PtModel,
    scheme: *const PtScheme,
    x: f64,
    opts: *const PtOptions,
    out: *mut f64,
) -> PtStatus {
    eval(model, scheme, x, Quantity::Cost, opts, out)
}

/// Loading `theta*` at which the subsidised household is as likely to be trapped as the uninsured one.
///
/// # Safety
/// `model` must be live; `value` and `out_verdict` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pt_optimal_theta(
    model: *const PtModel,
    kappa: f64,
    theta: f64,
    premium_mapping: PtPremiumMapping,
    x: f64,
    value: *mut f64,
    out_verdict: *mut PtVerdict,
) -> PtStatus {
    guard(|| {
        let m = get(model, "model")?;
        if value.is_null() || out_verdict.is_null() {
            return Err(Fail::Null("value or verdict"));
        }
        let o = optimal_theta(&m.0, kappa, theta, mapping(premium_mapping), x, &RootConfig::for_theta())?;
        put(value, o.value, "value")?;
        put(out_verdict, verdict(o.verdict), "verdict")
    })
}

/// Barrier `B*` at which the barrier scheme matches the uninsured trapping probability.
/// `b_max` NaN selects the default search range.
///
/// # Safety
/// Handles must be live; `opts` may be NULL; `value` and `out_verdict` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pt_optimal_barrier(
    model: *const PtModel,
    scheme: *const PtScheme,
    x: f64,
    b_max: f64,
    opts: *const PtOptions,
    value: *mut f64,
    out_verdict: *mut PtVerdict,
) -> PtStatus {
    guard(|| {
        let m = get(model, "model")?;
        let s = get(scheme, "scheme")?;
        if value.is_null() || out_verdict.is_null() {
            return Err(Fail::Null("value or verdict"));
        }
        let b_max = (!b_max.is_nan()).then_some(b_max);
        let root = RootConfig::for_barrier(m.0.x_star);
        let o = optimal_barrier(&m.0, &s.0, x, b_max, &root, context(opts).matching)?;
        put(value, o.value, "value")?;
        put(out_verdict, verdict(o.verdict), "verdict")
    })
}
