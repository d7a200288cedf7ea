//! Runs `python/smoke_test.py` against the module in an embedded interpreter.

use std::ffi::CString;

use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

#[test]
fn python_smoke_script() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../python/smoke_test.py");
    let source = CString::new(std::fs::read_to_string(path).expect("smoke script")).unwrap();
    Python::attach(|py| -> PyResult<()> {
        let module = PyModule::new(py, "qel")?;
        qel::qel(&module)?;
        py.import("sys")?.getattr("modules")?.set_item("qel", &module)?;
        let globals = PyDict::new(py);
        globals.set_item("__name__", "__main__")?;
        py.run(&source, Some(&globals), None)
    })
    .unwrap_or_else(|e| panic!("smoke script failed: {e}"));
}
