use pyo3::prelude::*;
use pyo3::types::PyModule;

fn with_module<F: FnOnce(&Bound<'_, PyModule>) -> PyResult<()>>(f: F) {
    Python::attach(|py| {
        let m = PyModule::new(py, "collective_dfs").unwrap();
        collective_dfs_py::init_module(&m).unwrap();
        f(&m).unwrap();
    });
}

#[test]
fn w_state_through_python_api() {
    with_module(|m| {
        let w = m.getattr("State")?.call_method1("from_family", (0.0, 0.0, 0.0))?;
        let n: f64 = m.getattr("ncr_star")?.call1((&w,))?.extract()?;
        assert!((n - 2f64.sqrt() / 3.0).abs() < 1e-12);
        let neg: f64 = m.getattr("negativity")?.call1((&w, vec![1usize]))?.extract()?;
        assert!((neg - n).abs() < 1e-10);
        Ok(())
    });
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(|m| {
        let py = m.py();
        let err = m.getattr("Propagator")?.call1((-1.0, 0.1)).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        let heavy = m.getattr("State")?.call1((vec![1.0, 1.0],))?;
        let c = m.getattr("Couplings")?.call1((vec![1.0, 1.0],))?;
        let p = m.getattr("Propagator")?.call_method1("from_ratio", (0.1,))?;
        let err = m.getattr("evolve")?.call1((heavy, c, p, 1.0)).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyArithmeticError>(py));
        Ok(())
    });
}

#[test]
fn tstar_dict_and_poles() {
    with_module(|m| {
        let w = m.getattr("State")?.call_method1("from_family", (0.0, 0.0, 0.0))?;
        let c = m.getattr("Couplings")?.call_method1("from_r12", (0.11, 0.11))?;
        let bad = m.getattr("Propagator")?.call_method1("from_ratio", (0.1,))?;
        let ts = m.getattr("find_tstar")?.call1((&w, &c, &bad))?;
        let qubit: usize = ts.get_item("qubit")?.extract()?;
        assert_eq!(qubit, 2);
        let good = m.getattr("Propagator")?.call_method1("from_ratio", (10.0,))?;
        let zero: f64 = good.call_method0("first_phi_zero")?.extract()?;
        assert!(good.call_method1("decay_rate", (zero,))?.is_none());
        Ok(())
    });
}
