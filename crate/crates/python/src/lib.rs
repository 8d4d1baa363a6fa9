//! Python module `jqt`: the command-line interface, in process.
//!
//! ```python
//! import jqt
//! r = jqt.call("jinv", q=2, cfrac="[0; | T]", eps="3,1")
//! r["result"]["abs_log"]   # 7
//! ```

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict};

use jqt_core::cli;

create_exception!(jqt, JqtError, PyException, "A jqt command exited with a nonzero code.");

/// Runs `jqt ARGS...` and returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let out = cli::run(std::iter::once("jqt".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

fn option_args(options: Option<&Bound<'_, PyDict>>) -> PyResult<Vec<String>> {
    let mut args = Vec::new();
    let Some(options) = options else {
        return Ok(args);
    };
    for (k, v) in options.iter() {
        if v.is_none() {
            continue;
        }
        let flag = format!("--{}", k.extract::<String>()?.replace('_', "-"));
        if v.is_instance_of::<PyBool>() {
            if v.extract::<bool>()? {
                args.push(flag);
            }
            continue;
        }
        args.push(flag);
        args.push(v.str()?.to_string());
    }
    Ok(args)
}

/// Runs a subcommand with `--format json` and returns the decoded document.
/// Keyword arguments become flags: `eps="3,1"` is `--eps 3,1`. Raises
/// `JqtError` (with the exit code as its second argument) on failure; the
/// `check` command's exit code 5 for failed criteria is returned normally.
#[pyfunction]
#[pyo3(signature = (command, **options))]
fn call<'py>(py: Python<'py>, command: &str, options: Option<&Bound<'py, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    let mut args = vec!["jqt".to_string(), command.to_string()];
    args.extend(option_args(options)?);
    args.extend(["--format".to_string(), "json".to_string()]);
    let out = cli::run(args);
    if out.code != 0 && !(command == "check" && out.code == cli::EXIT_CHECK_FAILED) {
        let msg = out.stderr.trim().trim_start_matches("error: ").to_string();
        return Err(JqtError::new_err((msg, out.code)));
    }
    py.import("json")?.call_method1("loads", (out.stdout,))
}

#[pymodule]
fn jqt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(call, m)?)?;
    m.add("JqtError", m.py().get_type::<JqtError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
