use std::ffi::{c_char, CStr, CString};
use std::ptr;

use morphic_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    morphic_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(morphic_last_error_message())
        .to_str()
        .unwrap()
        .to_owned()
}

unsafe fn morphism(text: &str) -> *mut MorphicMorphism {
    let mut m = ptr::null_mut();
    assert_eq!(
        morphic_morphism_parse(c(text).as_ptr(), &mut m),
        MorphicStatus::Ok
    );
    m
}

unsafe fn word(text: &str) -> *mut MorphicWord {
    let mut w = ptr::null_mut();
    assert_eq!(
        morphic_word_parse(c(text).as_ptr(), &mut w),
        MorphicStatus::Ok
    );
    w
}

#[test]
fn fixed_point_and_composition() {
    unsafe {
        let b3 = morphism("012/02/1");
        let mut w = ptr::null_mut();
        assert_eq!(
            morphic_fixed_point_prefix(b3, 12, &mut w),
            MorphicStatus::Ok
        );
        assert_eq!(morphic_word_len(w), 12);
        let mut s = ptr::null_mut();
        assert_eq!(morphic_word_to_string(w, &mut s), MorphicStatus::Ok);
        assert_eq!(take(s), "012021012102");

        let mut sq = ptr::null_mut();
        assert_eq!(morphic_morphism_compose(b3, b3, &mut sq), MorphicStatus::Ok);
        assert_eq!(morphic_morphism_to_string(sq, &mut s), MorphicStatus::Ok);
        assert_eq!(take(s), "012021/0121/02");

        let mut img = ptr::null_mut();
        assert_eq!(morphic_morphism_apply(b3, w, &mut img), MorphicStatus::Ok);
        assert_eq!(morphic_word_len(img), 12 + 8 + 4);

        let k5 = morphism("013431/0131/02");
        let mut kw = ptr::null_mut();
        assert_eq!(
            morphic_morphic_prefix(k5, b3, 10, &mut kw),
            MorphicStatus::Ok
        );
        assert_eq!(morphic_word_to_string(kw, &mut s), MorphicStatus::Ok);
        assert_eq!(take(s), "0134310131");

        for w in [w, img, kw] {
            morphic_word_free(w);
        }
        for m in [b3, sq, k5] {
            morphic_morphism_free(m);
        }
    }
}

#[test]
fn repetitions() {
    unsafe {
        let w = word("0010010");
        let mut s = ptr::null_mut();
        assert_eq!(morphic_distinct_squares(w, &mut s), MorphicStatus::Ok);
        assert_eq!(take(s), "00\n001001\n010010\n");
        assert_eq!(morphic_distinct_overlaps(w, &mut s), MorphicStatus::Ok);
        assert_eq!(take(s), "0010010\n");

        let (mut found, mut start, mut period) = (false, 0, 0);
        assert_eq!(
            morphic_find_sq_t(w, 3, &mut found, &mut start, &mut period),
            MorphicStatus::Ok
        );
        assert!(found);
        assert_eq!(period, 3);
        assert_eq!(
            morphic_find_sq_t(w, 4, &mut found, &mut start, &mut period),
            MorphicStatus::Ok
        );
        assert!(!found);

        let (mut num, mut den) = (0, 0);
        assert_eq!(
            morphic_max_exponent(w, &mut num, &mut den),
            MorphicStatus::Ok
        );
        assert_eq!((num, den), (7, 3));
        morphic_word_free(w);
    }
}

#[test]
fn formulas_and_constraints() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(
            morphic_formula_parse(c("ABABA").as_ptr(), &mut f),
            MorphicStatus::Ok
        );
        let (w, v) = (word("0120210"), word("0101010"));
        let mut r = false;
        assert_eq!(morphic_avoids(w, f, &mut r), MorphicStatus::Ok);
        assert!(r);
        assert_eq!(morphic_avoids(v, f, &mut r), MorphicStatus::Ok);
        assert!(!r);
        morphic_formula_free(f);

        let mut cs = ptr::null_mut();
        let text = c("alphabet 3\nforbid-formula AA\nforbid-factor 010 212\n");
        assert_eq!(
            morphic_constraints_parse(text.as_ptr(), &mut cs),
            MorphicStatus::Ok
        );
        let mut good = false;
        let mut viol = MorphicViolation::default();
        assert_eq!(
            morphic_check(w, cs, &mut good, &mut viol),
            MorphicStatus::Ok
        );
        assert!(good);
        assert_eq!(
            morphic_check(v, cs, &mut good, &mut viol),
            MorphicStatus::Ok
        );
        assert!(!good);
        assert_eq!(viol.kind, MorphicViolationKind::Factor as u32);
        assert_eq!((viol.start, viol.end), (0, 3));

        let mut counts = [0u64; 5];
        assert_eq!(
            morphic_count_by_length(cs, 5, counts.as_mut_ptr()),
            MorphicStatus::Ok
        );
        assert_eq!(counts[0], 3);

        let mut res = MorphicSearchResult::default();
        let mut best = ptr::null_mut();
        assert_eq!(
            morphic_longest_word_search(cs, 50, 1_000_000, &mut res, &mut best),
            MorphicStatus::Ok
        );
        assert!(!res.exhausted);
        assert_eq!(res.max_length, 50);
        assert_eq!(morphic_word_len(best), 50);

        let mut set = ptr::null_mut();
        assert_eq!(
            morphic_extendable_set(cs, 3, 5, &mut set),
            MorphicStatus::Ok
        );
        let set = take(set);
        assert!(set.lines().all(|l| l.len() == 3));
        assert!(!set.contains("010"));

        for x in [w, v, best] {
            morphic_word_free(x);
        }
        morphic_constraints_free(cs);
    }
}

#[test]
fn finite_language_is_exhausted() {
    unsafe {
        let mut cs = ptr::null_mut();
        let text = c("alphabet 2\nforbid-formula AA\n");
        assert_eq!(
            morphic_constraints_parse(text.as_ptr(), &mut cs),
            MorphicStatus::Ok
        );
        let mut res = MorphicSearchResult::default();
        assert_eq!(
            morphic_longest_word_search(cs, 10, 1_000, &mut res, ptr::null_mut()),
            MorphicStatus::Ok
        );
        assert!(res.exhausted);
        assert_eq!(res.max_length, 3);
        morphic_constraints_free(cs);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(
            morphic_morphism_parse(c("01/x").as_ptr(), &mut m),
            MorphicStatus::Syntax
        );
        assert!(m.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(
            morphic_morphism_parse(ptr::null(), &mut m),
            MorphicStatus::NullPointer
        );
        assert_eq!(
            morphic_morphism_parse(c("01/0").as_ptr(), ptr::null_mut()),
            MorphicStatus::NullPointer
        );

        let bad = [0xffu8, 0];
        let mut w = ptr::null_mut();
        assert_eq!(
            morphic_word_parse(bad.as_ptr() as *const c_char, &mut w),
            MorphicStatus::InvalidUtf8
        );

        let pd = morphism("01/00");
        let mut out = ptr::null_mut();
        let odd = morphism("1/0");
        assert_eq!(
            morphic_fixed_point_prefix(odd, 5, &mut out),
            MorphicStatus::Domain
        );

        let mut cs = ptr::null_mut();
        assert_eq!(
            morphic_constraints_from_file(c("/nonexistent/x.cons").as_ptr(), &mut cs),
            MorphicStatus::Io
        );

        let text = c("alphabet 3\nforbid-formula AA\n");
        assert_eq!(
            morphic_constraints_parse(text.as_ptr(), &mut cs),
            MorphicStatus::Ok
        );
        let mut res = MorphicSearchResult::default();
        assert_eq!(
            morphic_longest_word_search(cs, 10_000, 100, &mut res, ptr::null_mut()),
            MorphicStatus::Resource
        );

        assert_eq!(
            morphic_fixed_point_prefix(pd, 4, &mut out),
            MorphicStatus::Ok
        );
        assert!(last_error().is_empty());
        morphic_word_free(out);
        morphic_morphism_free(pd);
        morphic_morphism_free(odd);
        morphic_constraints_free(cs);
        morphic_word_free(ptr::null_mut());
        morphic_string_free(ptr::null_mut());
    }
}

#[test]
fn manifest_verdict() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests/b3");
    unsafe {
        let mut passed = false;
        let mut report = ptr::null_mut();
        let path = c(root.to_str().unwrap());
        assert_eq!(
            morphic_verify_manifest(path.as_ptr(), &mut passed, &mut report),
            MorphicStatus::Ok
        );
        assert!(passed);
        assert!(take(report).contains("VERDICT b3 PASS"));
    }
}

#[test]
fn header_declares_every_export() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/morphic.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 20);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which("cc") else {
        eprintln!("no C compiler; skipped");
        return;
    };
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let src = tempfile_c(
        "#include \"morphic.h\"\n\
         int main(void) {\n\
           MorphicMorphism *m = 0;\n\
           MorphicStatus s = morphic_morphism_parse(\"01/0\", &m);\n\
           morphic_morphism_free(m);\n\
           return s == MORPHIC_STATUS_OK ? 0 : 1;\n\
         }\n",
    );
    let status = std::process::Command::new(cc)
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&dir)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which(name: &str) -> Result<std::path::PathBuf, ()> {
    std::env::var_os("PATH")
        .and_then(|p| {
            std::env::split_paths(&p)
                .map(|d| d.join(name))
                .find(|f| f.is_file())
        })
        .ok_or(())
}

fn tempfile_c(body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("morphic-abi-{}.c", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}
