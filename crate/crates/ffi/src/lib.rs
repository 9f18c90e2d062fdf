//! C ABI over `aether_lab`.
//!
//! Every fallible call returns an [`AlStatus`]; on failure the message is
//! available from [`al_last_error_message`] until the next failing call on the
//! same thread. Handles are opaque and must be released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use aether_lab::cell::{homogenized_tensor, laminate_analytic, CellGrid};
use aether_lab::elasticity::{
    dispersion, gutierrez_tensor, iso_tensor, se_constant, vse_constant, GutierrezModuli, IsotropicPhase, Tensor4,
};
use aether_lab::elastodyn::{wave_benchmark_with, DynOptions};
use aether_lab::microstructure::{Geometry, UnitCell};
use aether_lab::Error;
use nalgebra::{Matrix4, Vector2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotConverged = 3,
    Indefinite = 4,
    Unstable = 5,
    Singular = 6,
    Io = 7,
    Panic = 8,
}

/// Isotropic phase constants.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AlPhase {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
}

/// Opaque fourth-order tensor.
pub struct AlTensor(Tensor4);

/// Opaque unit cell.
pub struct AlCell(UnitCell);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AlDispersion {
    pub omega: [f64; 2],
    /// Eigenvectors, mode-major.
    pub eta: [f64; 4],
    pub zero_mode: c_int,
    pub negative_mode: c_int,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AlBenchmark {
    pub dt: f64,
    pub steps: usize,
    pub max_rel_error: f64,
    pub energy_drift: f64,
    pub u1_ratio: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null,
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> AlStatus {
    match e {
        Error::Config { .. } | Error::Json(_) => AlStatus::InvalidArgument,
        Error::CgNotConverged { .. } | Error::EigenStagnation { .. } => AlStatus::NotConverged,
        Error::Indefinite { .. } => AlStatus::Indefinite,
        Error::Unstable { .. } => AlStatus::Unstable,
        Error::SingularLaminate { .. } => AlStatus::Singular,
        Error::Io(_) => AlStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AlStatus::Ok,
        Ok(Err(Failure::Null)) => {
            set_error("null pointer argument".into());
            AlStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            AlStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure::Null
}

fn phase(p: &AlPhase) -> Result<IsotropicPhase, Error> {
    IsotropicPhase::new(p.lambda, p.mu, p.rho)
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failure on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn al_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn al_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn al_iso_tensor(p: *const AlPhase, out: *mut *mut AlTensor) -> AlStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(null)?;
        emit(out, AlTensor(iso_tensor(&phase(p)?)))
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn al_gutierrez_tensor(
    p1: *const AlPhase,
    p2: *const AlPhase,
    out: *mut *mut AlTensor,
) -> AlStatus {
    guard(|| {
        let (p1, p2) = (p1.as_ref().ok_or_else(null)?, p2.as_ref().ok_or_else(null)?);
        let (t, _) = gutierrez_tensor(&phase(p1)?, &phase(p2)?)?;
        emit(out, AlTensor(t))
    })
}

/// Closed-form laminate tensor; `normal` is 1 or 2.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn al_laminate_tensor(
    p1: *const AlPhase,
    p2: *const AlPhase,
    theta: f64,
    normal: c_int,
    out: *mut *mut AlTensor,
) -> AlStatus {
    guard(|| {
        let (p1, p2) = (p1.as_ref().ok_or_else(null)?, p2.as_ref().ok_or_else(null)?);
        let normal = u8::try_from(normal).map_err(|_| Error::config("normal", "must be 1 or 2"))?;
        let t = laminate_analytic(&phase(p1)?, &phase(p2)?, theta, normal)?;
        emit(out, AlTensor(t))
    })
}

/// Tensor from 16 entries in `(2i+j, 2k+h)` row-major order.
///
/// # Safety
/// `entries` must point to 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn al_tensor_from_array(entries: *const f64, out: *mut *mut AlTensor) -> AlStatus {
    guard(|| {
        if entries.is_null() {
            return Err(null());
        }
        let s = std::slice::from_raw_parts(entries, 16);
        emit(out, AlTensor(Tensor4::from_matrix(Matrix4::from_row_slice(s))))
    })
}

/// Writes the 16 entries in `(2i+j, 2k+h)` row-major order.
///
/// # Safety
/// `t` must be a live handle and `out` must hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn al_tensor_to_array(t: *const AlTensor, out: *mut f64) -> AlStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let o = std::slice::from_raw_parts_mut(out, 16);
        for r in 0..4 {
            for c in 0..4 {
                o[4 * r + c] = t.0.matrix()[(r, c)];
            }
        }
        Ok(())
    })
}

/// `L_ijkh` with one-based indices (`1, 1, 2, 2` is `L1122`).
///
/// # Safety
/// `t` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn al_tensor_entry(
    t: *const AlTensor,
    i: usize,
    j: usize,
    k: usize,
    h: usize,
    out: *mut f64,
) -> AlStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(null)?;
        let out = out.as_mut().ok_or_else(null)?;
        if [i, j, k, h].iter().any(|x| !(1..=2).contains(x)) {
            return Err(Error::config("index", "indices must be 1 or 2").into());
        }
        *out = t.0.entry(i, j, k, h);
        Ok(())
    })
}

/// Strong-ellipticity constant `min L(a⊗b)·(a⊗b)` over unit `a`, `b`.
///
/// # Safety
/// `t` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn al_se_constant(t: *const AlTensor, out: *mut f64) -> AlStatus {
    guard(|| {
        *out.as_mut().ok_or_else(null)? = se_constant(&t.as_ref().ok_or_else(null)?.0);
        Ok(())
    })
}

/// Very-strong-ellipticity constant on symmetric matrices.
///
/// # Safety
/// `t` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn al_vse_constant(t: *const AlTensor, out: *mut f64) -> AlStatus {
    guard(|| {
        *out.as_mut().ok_or_else(null)? = vse_constant(&t.as_ref().ok_or_else(null)?.0);
        Ok(())
    })
}

/// Plane-wave modes of a Gutiérrez-form tensor at wave vector `(k1, k2)`.
///
/// # Safety
/// `t` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn al_dispersion(
    t: *const AlTensor,
    rho_bar: f64,
    k1: f64,
    k2: f64,
    out: *mut AlDispersion,
) -> AlStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(null)?;
        let out = out.as_mut().ok_or_else(null)?;
        let d = dispersion(&GutierrezModuli::from_tensor(&t.0), rho_bar, &Vector2::new(k1, k2))?;
        *out = AlDispersion {
            omega: [d.modes[0].omega, d.modes[1].omega],
            eta: [d.modes[0].eta[0], d.modes[0].eta[1], d.modes[1].eta[0], d.modes[1].eta[1]],
            zero_mode: d.zero_mode as c_int,
            negative_mode: d.negative_mode as c_int,
        };
        Ok(())
    })
}

/// # Safety
/// `t` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn al_tensor_free(t: *mut AlTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Layered cell; `theta` is the phase-1 fraction, `normal` is 1 or 2.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn al_cell_layers(
    p1: *const AlPhase,
    p2: *const AlPhase,
    theta: f64,
    normal: c_int,
    out: *mut *mut AlCell,
) -> AlStatus {
    guard(|| {
        let (p1, p2) = (p1.as_ref().ok_or_else(null)?, p2.as_ref().ok_or_else(null)?);
        let normal = u8::try_from(normal).map_err(|_| Error::config("normal", "must be 1 or 2"))?;
        let c = UnitCell::new(Geometry::Layers { theta, normal }, phase(p1)?, phase(p2)?)?;
        emit(out, AlCell(c))
    })
}

/// Cell with a phase-1 disk inclusion.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn al_cell_disk(
    p1: *const AlPhase,
    p2: *const AlPhase,
    cx: f64,
    cy: f64,
    radius: f64,
    out: *mut *mut AlCell,
) -> AlStatus {
    guard(|| {
        let (p1, p2) = (p1.as_ref().ok_or_else(null)?, p2.as_ref().ok_or_else(null)?);
        let g = Geometry::Disk {
            center: [cx, cy],
            radius,
        };
        emit(out, AlCell(UnitCell::new(g, phase(p1)?, phase(p2)?)?))
    })
}

/// Homogenized tensor from the periodic cell problem on an `n × n` grid.
///
/// # Safety
/// `cell` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn al_homogenize(cell: *const AlCell, n: usize, out: *mut *mut AlTensor) -> AlStatus {
    guard(|| {
        let cell = &cell.as_ref().ok_or_else(null)?.0;
        let t = homogenized_tensor(cell, &CellGrid::new(cell, n)?)?;
        emit(out, AlTensor(t))
    })
}

/// # Safety
/// `c` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn al_cell_free(c: *mut AlCell) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Transverse plane-wave benchmark on `(0, π)²` with an `m × m` grid.
///
/// # Safety
/// `l0` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn al_wave_benchmark(
    l0: *const AlTensor,
    rho_bar: f64,
    m: usize,
    out: *mut AlBenchmark,
) -> AlStatus {
    guard(|| {
        let l0 = &l0.as_ref().ok_or_else(null)?.0;
        let out = out.as_mut().ok_or_else(null)?;
        let r = wave_benchmark_with(m, l0, rho_bar, DynOptions::default())?;
        *out = AlBenchmark {
            dt: r.dt,
            steps: r.steps,
            max_rel_error: r.max_rel_error,
            energy_drift: r.energy_drift,
            u1_ratio: r.u1_ratio,
        };
        Ok(())
    })
}
