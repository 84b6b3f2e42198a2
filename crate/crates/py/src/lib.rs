//! Python bindings (stub).
use pyo3::prelude::*;

#[pymodule]
fn quasiphoton_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
