use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use invrig_ffi::*;

fn last_error() -> String {
    let p = invrig_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn octahedron_faces() -> Vec<usize> {
    vec![
        0, 1, 4, 1, 2, 4, 2, 3, 4, 3, 0, 4, 1, 0, 5, 2, 1, 5, 3, 2, 5, 0, 3, 5,
    ]
}

#[test]
fn koebe_octahedron_is_rigid() {
    let faces = octahedron_faces();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(
            invrig_koebe_framework(6, 8, faces.as_ptr(), 0, 0.0, &mut f),
            InvrigStatus::Ok
        );
        assert_eq!(invrig_framework_num_circles(f), 6);
        assert_eq!(invrig_framework_num_edges(f), 12);
        let (mut rank, mut required, mut rigid) = (0usize, 0i64, false);
        assert_eq!(
            invrig_rank(f, false, 0.0, &mut rank, &mut required, &mut rigid),
            InvrigStatus::Ok
        );
        assert_eq!((rank, required, rigid), (12, 12, true));
        let mut count = 99;
        assert_eq!(invrig_stress_count(f, 0.0, &mut count), InvrigStatus::Ok);
        assert_eq!(count, 0);

        let mut inv = vec![0.0; 12];
        assert_eq!(
            invrig_inversive_distances(f, inv.as_mut_ptr(), 12, ptr::null_mut()),
            InvrigStatus::Ok
        );
        assert!(inv.iter().all(|x| (x - 1.0).abs() < 1e-10));

        let mut needed = 0;
        assert_eq!(
            invrig_rigidity_matrix(f, ptr::null_mut(), 0, &mut needed),
            InvrigStatus::BufferTooSmall
        );
        assert_eq!(needed, 12 * 18);
        let mut r = vec![0.0; needed];
        assert_eq!(
            invrig_rigidity_matrix(f, r.as_mut_ptr(), r.len(), &mut needed),
            InvrigStatus::Ok
        );
        assert!(r.iter().any(|&x| x != 0.0));

        let mut edges = vec![0usize; 24];
        assert_eq!(
            invrig_framework_edges(f, edges.as_mut_ptr(), 24, ptr::null_mut()),
            InvrigStatus::Ok
        );
        assert_eq!(&edges[..2], &[0, 1]);
        invrig_framework_free(f);
    }
}

#[test]
fn json_round_trip() {
    let doc =
        CString::new(r#"{"circles":[{"x":0,"y":0,"r":1},{"x":2,"y":0,"r":1}],"edges":[[0,1]]}"#)
            .unwrap();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(
            invrig_framework_from_json(doc.as_ptr(), &mut f),
            InvrigStatus::Ok
        );
        let mut needed = 0;
        assert_eq!(
            invrig_framework_to_json(f, ptr::null_mut(), 0, &mut needed),
            InvrigStatus::BufferTooSmall
        );
        let mut buf = vec![0 as std::ffi::c_char; needed];
        assert_eq!(
            invrig_framework_to_json(f, buf.as_mut_ptr(), needed, &mut needed),
            InvrigStatus::Ok
        );
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        let mut g = ptr::null_mut();
        let c = CString::new(text).unwrap();
        assert_eq!(
            invrig_framework_from_json(c.as_ptr(), &mut g),
            InvrigStatus::Ok
        );
        let (mut a, mut b) = ([0.0; 6], [0.0; 6]);
        invrig_framework_coordinates(f, a.as_mut_ptr(), 6, ptr::null_mut());
        invrig_framework_coordinates(g, b.as_mut_ptr(), 6, ptr::null_mut());
        assert_eq!(a, b);
        invrig_framework_free(f);
        invrig_framework_free(g);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut f = ptr::null_mut();
    unsafe {
        let bad = CString::new("{\"circles\": [").unwrap();
        assert_eq!(
            invrig_framework_from_json(bad.as_ptr(), &mut f),
            InvrigStatus::Parse
        );
        assert!(last_error().contains("line"));
        assert!(f.is_null());

        let xs = [0.0, 3.0];
        let rs = [1.0, 1.0];
        let edges = [0usize, 1];
        assert_eq!(
            invrig_framework_new(
                2,
                xs.as_ptr(),
                ptr::null(),
                rs.as_ptr(),
                1,
                edges.as_ptr(),
                &mut f
            ),
            InvrigStatus::NullPointer
        );
        let ys = [0.0, 0.0];
        let out_of_range = [0usize, 7];
        assert_eq!(
            invrig_framework_new(
                2,
                xs.as_ptr(),
                ys.as_ptr(),
                rs.as_ptr(),
                1,
                out_of_range.as_ptr(),
                &mut f
            ),
            InvrigStatus::Validation
        );
        assert_eq!(
            invrig_framework_new(
                2,
                xs.as_ptr(),
                ys.as_ptr(),
                rs.as_ptr(),
                1,
                edges.as_ptr(),
                &mut f
            ),
            InvrigStatus::Ok
        );
        assert!(invrig_last_error_message().is_null());
        assert_eq!(
            invrig_rank(
                f,
                false,
                -1.0,
                ptr::null_mut(),
                ptr::null_mut(),
                ptr::null_mut()
            ),
            InvrigStatus::InvalidArgument
        );
        invrig_framework_free(f);
        invrig_framework_free(ptr::null_mut());

        let faces = octahedron_faces();
        assert_eq!(
            invrig_koebe_framework(6, 8, faces.as_ptr(), 9, 0.0, &mut f),
            InvrigStatus::InvalidArgument
        );
        assert_eq!(
            invrig_koebe_framework(6, 7, faces.as_ptr(), 0, 0.0, &mut f),
            InvrigStatus::Validation
        );
        assert_eq!(invrig_framework_num_circles(ptr::null()), 0);
    }
}

#[test]
fn header_is_generated() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/invrig.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "invrig_framework_new",
        "invrig_rank",
        "invrig_last_error_message",
        "INVRIG_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

/// Compiles `tests/smoke.c` against the generated header and the static
/// library, then runs it.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libinvrig_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok 0.1.0"));
}
