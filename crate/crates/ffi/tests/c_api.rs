use std::ffi::{CStr, CString};
use std::ptr;

use ebm_ffi::*;

const STAR: &str = "0 1\n0 2\n0 3\n0 4\n5 6\n";

unsafe fn load(text: &str) -> *mut EbmGraph {
    let c = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(ebm_graph_load_str(c.as_ptr(), 0, &mut g), EbmStatus::Ok);
    g
}

unsafe fn last_error() -> String {
    let p = ebm_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn load_and_count() {
    unsafe {
        let g = load(STAR);
        assert_eq!(ebm_graph_node_count(g), 7);
        assert_eq!(ebm_graph_arc_count(g), 10);
        ebm_graph_free(g);
    }
}

#[test]
fn parse_error_sets_message() {
    unsafe {
        let c = CString::new("0 1 2.5\n").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(ebm_graph_load_str(c.as_ptr(), 0, &mut g), EbmStatus::Parse);
        assert!(g.is_null());
        assert!(last_error().contains("line 1"));
    }
}

#[test]
fn missing_file_is_io_error() {
    unsafe {
        let c = CString::new("/nonexistent/graph.txt").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(ebm_graph_load_file(c.as_ptr(), 1, &mut g), EbmStatus::Io);
    }
}

#[test]
fn load_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, STAR).unwrap();
    unsafe {
        let c = CString::new(path.to_str().unwrap()).unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(ebm_graph_load_file(c.as_ptr(), 1, &mut g), EbmStatus::Ok);
        assert_eq!(ebm_graph_arc_count(g), 5);
        ebm_graph_free(g);
    }
}

#[test]
fn null_handles() {
    unsafe {
        assert_eq!(ebm_graph_node_count(ptr::null()), 0);
        assert_eq!(
            ebm_graph_assign_uniform(ptr::null_mut(), 0.1),
            EbmStatus::NullPointer
        );
        let opts = ebm_select_options_default();
        let mut r = ptr::null_mut();
        assert_eq!(
            ebm_select(ptr::null(), &opts, &mut r),
            EbmStatus::NullPointer
        );
        ebm_graph_free(ptr::null_mut());
        ebm_result_free(ptr::null_mut());
    }
}

#[test]
fn select_requires_assignment() {
    unsafe {
        let g = load(STAR);
        let opts = ebm_select_options_default();
        let mut r = ptr::null_mut();
        assert_eq!(ebm_select(g, &opts, &mut r), EbmStatus::NotReady);
        assert_eq!(
            ebm_graph_assign_economics(g, EbmEconomics::Random, 0.5, 1),
            EbmStatus::NotReady
        );
        ebm_graph_free(g);
    }
}

#[test]
fn invalid_probability_rejected() {
    unsafe {
        let g = load(STAR);
        assert_eq!(ebm_graph_assign_uniform(g, 1.5), EbmStatus::InvalidArgument);
        ebm_graph_free(g);
    }
}

#[test]
fn every_algorithm_respects_budget() {
    unsafe {
        let g = load(STAR);
        assert_eq!(ebm_graph_assign_uniform(g, 0.5), EbmStatus::Ok);
        assert_eq!(
            ebm_graph_assign_economics(g, EbmEconomics::DegreeProportional, 0.5, 3),
            EbmStatus::Ok
        );
        for algorithm in [
            EbmAlgorithm::Igaag,
            EbmAlgorithm::Igaip,
            EbmAlgorithm::Hbh,
            EbmAlgorithm::MaxDeg,
            EbmAlgorithm::DegDis,
            EbmAlgorithm::SinDis,
        ] {
            let mut opts = ebm_select_options_default();
            opts.algorithm = algorithm;
            opts.budget = 3.0;
            opts.samples = 500;
            opts.threads = 2;
            let mut r = ptr::null_mut();
            assert_eq!(ebm_select(g, &opts, &mut r), EbmStatus::Ok, "{algorithm:?}");
            let k = ebm_result_seed_count(r);
            assert!(k >= 1);
            let mut seeds = vec![usize::MAX; k + 2];
            assert_eq!(ebm_result_seeds(r, seeds.as_mut_ptr(), seeds.len()), k);
            assert!(seeds[..k].iter().all(|&s| s < 7));
            assert!(ebm_result_spent(r) <= 3.0 + 1e-9);
            let greedy = matches!(algorithm, EbmAlgorithm::Igaag | EbmAlgorithm::Igaip);
            assert_eq!(ebm_result_benefit(r).is_nan(), !greedy);
            let mut b = -1.0;
            assert_eq!(
                ebm_estimate_benefit(g, seeds.as_ptr(), k, 500, 9, &mut b),
                EbmStatus::Ok
            );
            assert!(b >= 0.0);
            ebm_result_free(r);
        }
        ebm_graph_free(g);
    }
}

#[test]
fn bad_budget_is_invalid_argument() {
    unsafe {
        let g = load(STAR);
        ebm_graph_assign_trivalency(g, 4);
        ebm_graph_assign_economics(g, EbmEconomics::Random, 0.3, 4);
        let mut opts = ebm_select_options_default();
        opts.budget = -1.0;
        let mut r = ptr::null_mut();
        assert_eq!(ebm_select(g, &opts, &mut r), EbmStatus::InvalidArgument);
        assert!(last_error().contains("budget"));
        ebm_graph_free(g);
    }
}

#[test]
fn estimate_of_empty_set_is_zero() {
    unsafe {
        let g = load(STAR);
        ebm_graph_assign_uniform(g, 0.2);
        ebm_graph_assign_economics(g, EbmEconomics::Random, 0.5, 0);
        let mut b = -1.0;
        assert_eq!(
            ebm_estimate_benefit(g, ptr::null(), 0, 100, 0, &mut b),
            EbmStatus::Ok
        );
        assert_eq!(b, 0.0);
        ebm_graph_free(g);
    }
}

#[test]
fn header_declares_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ebm.h")).unwrap();
    for name in [
        "ebm_graph_load_file",
        "ebm_graph_load_str",
        "ebm_select",
        "ebm_result_seeds",
        "ebm_last_error_message",
        "EBM_STATUS_NOT_READY",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
