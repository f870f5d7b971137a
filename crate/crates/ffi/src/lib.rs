//! C ABI over `fewbody-core`.
//!
//! Models are opaque handles built from configuration text. Every entry
//! point returns an [`FbStatus`]; on failure the message is kept per thread
//! and read with [`fb_last_error_message`]. Results go through out-pointers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use fewbody::cli::RunConfig;
use fewbody::faddeev::RadiusScan;
use fewbody::model::{self, ModelSpec, Pair};
use fewbody::variational::{build_basis, probability_inside, GroundState, VariationalProblem};
use fewbody::{twobody, Error};

/// Status codes; 2 to 4 coincide with the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbStatus {
    Ok = 0,
    /// Null pointer, invalid UTF-8 or an argument outside its domain.
    InvalidArgument = 1,
    ConfigError = 2,
    NumericError = 3,
    Inconclusive = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Opaque model handle.
pub struct FbModel {
    config: RunConfig,
    model: ModelSpec,
    problem: OnceLock<Result<VariationalProblem, Error>>,
    ground: OnceLock<Result<GroundState, Error>>,
    scan: OnceLock<Result<RadiusScan, Error>>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn numeric(e: &Error) -> FbStatus {
    set_error(e.to_string());
    FbStatus::NumericError
}

fn guard(f: impl FnOnce() -> FbStatus) -> FbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == FbStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => {
            set_error("panic inside fewbody");
            FbStatus::Panic
        }
    }
}

impl FbModel {
    fn problem(&self) -> Result<&VariationalProblem, FbStatus> {
        let p = self.problem.get_or_init(|| {
            let basis = build_basis(&self.config.basis_spec(&self.model), &self.model.masses)?;
            VariationalProblem::with_options(&self.model, basis, self.config.numerics.gram_floor, self.config.numerics.symmetrize)
        });
        p.as_ref().map_err(numeric)
    }

    fn ground(&self) -> Result<&GroundState, FbStatus> {
        let problem = self.problem()?;
        let g = self.ground.get_or_init(|| problem.solve(self.model.couplings.as_array()));
        g.as_ref().map_err(numeric)
    }

    fn scan(&self) -> Result<&RadiusScan, FbStatus> {
        let s = self.scan.get_or_init(|| RadiusScan::new(&self.model, self.config.experiment.path, &self.config.grid_spec()));
        s.as_ref().map_err(numeric)
    }
}

/// Parses configuration text into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fb_model_from_config(text: *const c_char, out: *mut *mut FbModel) -> FbStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            set_error("null pointer");
            return FbStatus::InvalidArgument;
        }
        // SAFETY: checked non-null; the caller guarantees termination.
        let Ok(text) = (unsafe { CStr::from_ptr(text) }).to_str() else {
            set_error("configuration is not UTF-8");
            return FbStatus::InvalidArgument;
        };
        let config = match RunConfig::parse_str(text) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return FbStatus::ConfigError;
            }
        };
        let model = match config.model() {
            Ok(m) => m,
            Err(e) => return numeric(&e),
        };
        let handle = Box::new(FbModel { config, model, problem: OnceLock::new(), ground: OnceLock::new(), scan: OnceLock::new() });
        // SAFETY: `out` checked non-null.
        unsafe { *out = Box::into_raw(handle) };
        FbStatus::Ok
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `model` must come from [`fb_model_from_config`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fb_model_free(model: *mut FbModel) {
    if !model.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(model) });
    }
}

unsafe fn deref<'a>(model: *const FbModel) -> Result<&'a FbModel, FbStatus> {
    if model.is_null() {
        set_error("null model handle");
        return Err(FbStatus::InvalidArgument);
    }
    // SAFETY: caller passes a live handle.
    Ok(unsafe { &*model })
}

fn write<T>(out: *mut T, v: T) -> FbStatus {
    if out.is_null() {
        set_error("null output pointer");
        return FbStatus::InvalidArgument;
    }
    // SAFETY: checked non-null; the caller owns the storage.
    unsafe { out.write(v) };
    FbStatus::Ok
}

/// Writes the 64 hex digits of the configuration hash and a NUL into `buf`,
/// which must hold at least 65 bytes.
///
/// # Safety
/// `model` must be a live handle and `buf` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn fb_config_hash(model: *const FbModel, buf: *mut c_char, len: usize) -> FbStatus {
    guard(|| {
        let m = match unsafe { deref(model) } {
            Ok(m) => m,
            Err(s) => return s,
        };
        let h = m.config.hash();
        if buf.is_null() || len < h.len() + 1 {
            set_error("hash buffer needs 65 bytes");
            return FbStatus::InvalidArgument;
        }
        // SAFETY: `buf` holds at least `h.len() + 1` bytes.
        unsafe {
            std::ptr::copy_nonoverlapping(h.as_ptr().cast::<c_char>(), buf, h.len());
            *buf.add(h.len()) = 0;
        }
        FbStatus::Ok
    })
}

/// Threshold coupling of one pair (12, 13 or 23) in its Jacobi variable.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_two_body_threshold(model: *const FbModel, pair: i32, out: *mut f64) -> FbStatus {
    guard(|| {
        let m = match unsafe { deref(model) } {
            Ok(m) => m,
            Err(s) => return s,
        };
        let Some(p) = Pair::parse(&pair.to_string()) else {
            set_error(format!("pair must be 12, 13 or 23, got {pair}"));
            return FbStatus::InvalidArgument;
        };
        let pot = m.model.frame_potential(p);
        let grid = model::radial_grid(&pot, m.config.numerics.radial_nodes);
        match twobody::critical_coupling(&pot, &grid, m.config.numerics.tol) {
            Ok(l) => write(out, l),
            Err(e) => numeric(&e),
        }
    })
}

/// Zero-energy spectral radius of the Faddeev operator at parameter `s` of
/// the configured coupling path, extrapolated from two small `z`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_bs_radius(model: *const FbModel, s: f64, out: *mut f64) -> FbStatus {
    guard(|| {
        let m = match unsafe { deref(model) } {
            Ok(m) => m,
            Err(st) => return st,
        };
        let scan = match m.scan() {
            Ok(sc) => sc,
            Err(st) => return st,
        };
        match scan.extrapolated(s) {
            Ok(r) => write(out, r),
            Err(e) => numeric(&e),
        }
    })
}

/// Variational ground energy and continuum threshold at the configured
/// couplings. Either out-pointer may be null.
///
/// # Safety
/// `model` must be a live handle; non-null outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_ground_energy(model: *const FbModel, energy: *mut f64, threshold: *mut f64) -> FbStatus {
    guard(|| {
        let m = match unsafe { deref(model) } {
            Ok(m) => m,
            Err(s) => return s,
        };
        let g = match m.ground() {
            Ok(g) => g,
            Err(s) => return s,
        };
        if !energy.is_null() {
            write(energy, g.energy);
        }
        if !threshold.is_null() {
            write(threshold, g.threshold);
        }
        FbStatus::Ok
    })
}

/// Probability that the ground state has hyperradius below `r`.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fb_probability_inside(model: *const FbModel, r: f64, out: *mut f64) -> FbStatus {
    guard(|| {
        let m = match unsafe { deref(model) } {
            Ok(m) => m,
            Err(s) => return s,
        };
        if !(r >= 0.0) {
            set_error(format!("radius must be non-negative, got {r}"));
            return FbStatus::InvalidArgument;
        }
        let g = match m.ground() {
            Ok(g) => g,
            Err(s) => return s,
        };
        match probability_inside(g, r) {
            Ok(p) => write(out, p),
            Err(e) => numeric(&e),
        }
    })
}

/// Message of the last failure on this thread, empty after a success. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn fb_version() -> *const c_char {
    static V: OnceLock<CString> = OnceLock::new();
    V.get_or_init(|| CString::new(env!("CARGO_PKG_VERSION")).expect("no NUL")).as_ptr()
}
