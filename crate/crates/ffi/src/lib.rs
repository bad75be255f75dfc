//! C ABI over the switched-feedback MAC library.
//!
//! Channels and profiles are opaque handles created from JSON documents or
//! built-in presets and released with the matching `_free` function. Every
//! fallible call returns an [`SmStatus`]; on failure a thread-local message
//! is available through [`sm_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use switched_mac::error::Error;
use switched_mac::opt::{self, AscentOptions};
use switched_mac::profile::FeedforwardProfile;
use switched_mac::regions;
use switched_mac::MacChannel;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonConvergence = 3,
    ResourceLimit = 4,
    InvalidUtf8 = 5,
}

pub struct SmChannel {
    inner: MacChannel,
}

pub struct SmProfile {
    inner: FeedforwardProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(cleaned).unwrap_or_default());
}

fn status_of(err: &Error) -> SmStatus {
    match err {
        Error::Validation(_) | Error::Format(_) | Error::Io(_) => SmStatus::InvalidArgument,
        Error::NonConvergence { .. } => SmStatus::NonConvergence,
        Error::ResourceCap(_) => SmStatus::ResourceLimit,
    }
}

fn fail(err: Error) -> SmStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, SmStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(SmStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        SmStatus::InvalidUtf8
    })
}

// ---------------------------------------------------------------------------
// Channel handles
// ---------------------------------------------------------------------------

/// Parse a channel from a JSON document (see the library's channel format).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid location; on
/// `SM_STATUS_OK` the caller owns the handle and must release it with
/// [`sm_channel_free`].
#[no_mangle]
pub unsafe extern "C" fn sm_channel_parse_json(
    json: *const c_char,
    out: *mut *mut SmChannel,
) -> SmStatus {
    if out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    let text = match read_utf8(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match MacChannel::from_json(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SmChannel { inner }));
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// The binary additive MAC `Y = X1 + X2`.
///
/// # Safety
/// `out` must be a valid location; the caller owns the returned handle.
#[no_mangle]
pub unsafe extern "C" fn sm_channel_binary_adder(out: *mut *mut SmChannel) -> SmStatus {
    if out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(SmChannel {
        inner: MacChannel::binary_adder(),
    }));
    SmStatus::Ok
}

/// The grouped-inputs construction with group size `alpha >= 2`.
///
/// # Safety
/// `out` must be a valid location; the caller owns the returned handle.
#[no_mangle]
pub unsafe extern "C" fn sm_channel_example2(alpha: u32, out: *mut *mut SmChannel) -> SmStatus {
    if out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    match regions::build_example2(alpha) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SmChannel { inner }));
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a channel handle. Passing NULL is a no-op.
///
/// # Safety
/// `ch` must be a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_channel_free(ch: *mut SmChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

// ---------------------------------------------------------------------------
// Profile handles
// ---------------------------------------------------------------------------

/// Constant feedforward probability profile `p(t) = p`.
///
/// # Safety
/// `out` must be a valid location; the caller owns the returned handle.
#[no_mangle]
pub unsafe extern "C" fn sm_profile_constant(p: f64, out: *mut *mut SmProfile) -> SmStatus {
    if out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    match FeedforwardProfile::constant(p) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SmProfile { inner }));
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Feedback-first step profile with the given feedforward fraction.
///
/// # Safety
/// `out` must be a valid location; the caller owns the returned handle.
#[no_mangle]
pub unsafe extern "C" fn sm_profile_step(p_avg: f64, out: *mut *mut SmProfile) -> SmStatus {
    if out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    match FeedforwardProfile::step(p_avg) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SmProfile { inner }));
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Parse a profile from its JSON document (array of segments).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn sm_profile_parse_json(
    json: *const c_char,
    out: *mut *mut SmProfile,
) -> SmStatus {
    if out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    let text = match read_utf8(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match FeedforwardProfile::from_json(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SmProfile { inner }));
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a profile handle. Passing NULL is a no-op.
///
/// # Safety
/// `pr` must be a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_profile_free(pr: *mut SmProfile) {
    if !pr.is_null() {
        drop(Box::from_raw(pr));
    }
}

// ---------------------------------------------------------------------------
// Computations
// ---------------------------------------------------------------------------

unsafe fn channel_ref<'a>(ch: *const SmChannel) -> Result<&'a MacChannel, SmStatus> {
    if ch.is_null() {
        set_error("null channel handle");
        return Err(SmStatus::NullPointer);
    }
    Ok(&(*ch).inner)
}

unsafe fn profile_ref<'a>(pr: *const SmProfile) -> Result<&'a FeedforwardProfile, SmStatus> {
    if pr.is_null() {
        set_error("null profile handle");
        return Err(SmStatus::NullPointer);
    }
    Ok(&(*pr).inner)
}

/// `max_{P(x1,x2)} I(X1,X2;Y)` in bits, within `tol` of the true maximum.
///
/// # Safety
/// `ch` must be a live channel handle and `value_out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn sm_max_joint_mi(
    ch: *const SmChannel,
    tol: f64,
    value_out: *mut f64,
) -> SmStatus {
    let channel = match channel_ref(ch) {
        Ok(c) => c,
        Err(s) => return s,
    };
    if value_out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    match opt::max_joint_mi(channel, tol) {
        Ok(r) => {
            *value_out = r.value;
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// 1 if the channel satisfies the shared-information class condition
/// (each input recoverable from the output and the other input), else 0.
///
/// # Safety
/// `ch` must be a live channel handle and `holds_out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn sm_class_check(ch: *const SmChannel, holds_out: *mut u8) -> SmStatus {
    let channel = match channel_ref(ch) {
        Ok(c) => c,
        Err(s) => return s,
    };
    if holds_out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    *holds_out = opt::theorem1_class_check(channel).holds as u8;
    SmStatus::Ok
}

/// Largest constant feedforward probability for which the exact sum
/// characterisation holds (class channels only).
///
/// # Safety
/// `ch` must be a live channel handle and `threshold_out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn sm_theorem1_threshold(
    ch: *const SmChannel,
    threshold_out: *mut f64,
) -> SmStatus {
    let channel = match channel_ref(ch) {
        Ok(c) => c,
        Err(s) => return s,
    };
    if threshold_out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    match regions::theorem1_threshold(channel) {
        Ok(t) => {
            *threshold_out = t;
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Shannon-type inner and outer bounds on the two-way sum-rate.
///
/// # Safety
/// `ch` must be a live channel handle; both outputs valid locations.
#[no_mangle]
pub unsafe extern "C" fn sm_two_way_sum_bounds(
    ch: *const SmChannel,
    restarts: u32,
    seed: u64,
    inner_out: *mut f64,
    outer_out: *mut f64,
) -> SmStatus {
    let channel = match channel_ref(ch) {
        Ok(c) => c,
        Err(s) => return s,
    };
    if inner_out.is_null() || outer_out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    let opts = AscentOptions::quick(restarts.max(1) as usize, seed);
    match opt::two_way_sum_bounds(channel, &opts) {
        Ok(b) => {
            *inner_out = b.sum_inner;
            *outer_out = b.sum_outer;
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Cooperative outer bound on the sum rate,
/// `p_avg · max I(X1,X2;Y)`.
///
/// # Safety
/// `ch` and `pr` must be live handles and `sum_out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn sm_prop1_sum(
    ch: *const SmChannel,
    pr: *const SmProfile,
    sum_out: *mut f64,
) -> SmStatus {
    let channel = match channel_ref(ch) {
        Ok(c) => c,
        Err(s) => return s,
    };
    let profile = match profile_ref(pr) {
        Ok(p) => p,
        Err(s) => return s,
    };
    if sum_out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    match regions::prop1_outer(channel, profile) {
        Ok(r) => {
            *sum_out = r.max_sum();
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Known-switching-pattern sum-capacity interval, discretised to
/// `b_blocks` blocks. `u_size = 0` selects the default cardinality.
///
/// # Safety
/// `ch` and `pr` must be live handles; both outputs valid locations.
#[no_mangle]
pub unsafe extern "C" fn sm_ksp_sum_interval(
    ch: *const SmChannel,
    pr: *const SmProfile,
    b_blocks: u32,
    u_size: u32,
    restarts: u32,
    seed: u64,
    inner_out: *mut f64,
    outer_out: *mut f64,
) -> SmStatus {
    let channel = match channel_ref(ch) {
        Ok(c) => c,
        Err(s) => return s,
    };
    let profile = match profile_ref(pr) {
        Ok(p) => p,
        Err(s) => return s,
    };
    if inner_out.is_null() || outer_out.is_null() {
        set_error("null output pointer");
        return SmStatus::NullPointer;
    }
    let u = if u_size == 0 {
        opt::default_u_size(channel)
    } else {
        u_size as usize
    };
    let opts = AscentOptions::quick(restarts.max(1) as usize, seed);
    match regions::ksp_sum_capacity(channel, profile, b_blocks as usize, u, &opts) {
        Ok(e) => {
            *inner_out = e.sum_value_inner;
            *outer_out = e.sum_value_outer;
            SmStatus::Ok
        }
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    const LOG2_3: f64 = 1.584962500721156;

    #[test]
    fn adder_capacity_through_the_c_surface() {
        unsafe {
            let mut ch: *mut SmChannel = ptr::null_mut();
            assert_eq!(sm_channel_binary_adder(&mut ch), SmStatus::Ok);
            let mut value = 0.0;
            assert_eq!(sm_max_joint_mi(ch, 1e-9, &mut value), SmStatus::Ok);
            assert!((value - LOG2_3).abs() < 1e-6);
            let mut threshold = 0.0;
            assert_eq!(sm_theorem1_threshold(ch, &mut threshold), SmStatus::Ok);
            assert!((threshold - 0.5794).abs() < 1e-3);
            let mut holds = 0u8;
            assert_eq!(sm_class_check(ch, &mut holds), SmStatus::Ok);
            assert_eq!(holds, 1);
            sm_channel_free(ch);
        }
    }

    #[test]
    fn json_round_trip_and_prop1() {
        let doc = serde_json::to_string(&MacChannel::binary_adder().to_doc()).unwrap();
        let cjson = CString::new(doc).unwrap();
        unsafe {
            let mut ch: *mut SmChannel = ptr::null_mut();
            assert_eq!(sm_channel_parse_json(cjson.as_ptr(), &mut ch), SmStatus::Ok);
            let mut pr: *mut SmProfile = ptr::null_mut();
            assert_eq!(sm_profile_constant(0.5, &mut pr), SmStatus::Ok);
            let mut sum = 0.0;
            assert_eq!(sm_prop1_sum(ch, pr, &mut sum), SmStatus::Ok);
            assert!((sum - 0.5 * LOG2_3).abs() < 1e-6);
            sm_profile_free(pr);
            sm_channel_free(ch);
        }
    }

    #[test]
    fn two_way_and_ksp_through_the_c_surface() {
        unsafe {
            let mut ch: *mut SmChannel = ptr::null_mut();
            sm_channel_binary_adder(&mut ch);
            let (mut inner, mut outer) = (0.0, 0.0);
            assert_eq!(
                sm_two_way_sum_bounds(ch, 6, 1, &mut inner, &mut outer),
                SmStatus::Ok
            );
            assert!((inner - 2.0).abs() < 1e-6 && (outer - 2.0).abs() < 1e-6);

            let mut pr: *mut SmProfile = ptr::null_mut();
            sm_profile_step(0.5, &mut pr);
            let (mut lo, mut hi) = (0.0, 0.0);
            assert_eq!(
                sm_ksp_sum_interval(ch, pr, 8, 0, 8, 1, &mut lo, &mut hi),
                SmStatus::Ok
            );
            assert!(lo <= 0.5 * LOG2_3 + 1e-6 && hi >= 0.5 * LOG2_3 - 1e-6);
            sm_profile_free(pr);
            sm_channel_free(ch);
        }
    }

    #[test]
    fn errors_set_status_and_message() {
        unsafe {
            let mut ch: *mut SmChannel = ptr::null_mut();
            let bad = CString::new("{\"x1_size\": 1}").unwrap();
            assert_eq!(
                sm_channel_parse_json(bad.as_ptr(), &mut ch),
                SmStatus::InvalidArgument
            );
            let msg = CStr::from_ptr(sm_last_error_message());
            assert!(!msg.to_bytes().is_empty());

            assert_eq!(
                sm_channel_parse_json(ptr::null(), &mut ch),
                SmStatus::NullPointer
            );
            let mut value = 0.0;
            assert_eq!(
                sm_max_joint_mi(ptr::null(), 1e-9, &mut value),
                SmStatus::NullPointer
            );

            let mut big: *mut SmChannel = ptr::null_mut();
            assert_eq!(sm_channel_example2(9, &mut big), SmStatus::ResourceLimit);

            let mut pr: *mut SmProfile = ptr::null_mut();
            assert_eq!(sm_profile_constant(1.5, &mut pr), SmStatus::InvalidArgument);

            // frees tolerate NULL
            sm_channel_free(ptr::null_mut());
            sm_profile_free(ptr::null_mut());
        }
    }

    #[test]
    fn version_is_exposed() {
        unsafe {
            let v = CStr::from_ptr(sm_version());
            assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
        }
    }

    #[test]
    fn generated_header_declares_the_surface() {
        let header = std::fs::read_to_string(
            std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/switched_mac.h"),
        )
        .expect("header generated by the build script");
        for needle in [
            "typedef struct SmChannel SmChannel;",
            "sm_max_joint_mi",
            "sm_ksp_sum_interval",
            "sm_last_error_message",
            "SM_STATUS_OK",
        ] {
            assert!(header.contains(needle), "header missing `{needle}`");
        }
    }
}
