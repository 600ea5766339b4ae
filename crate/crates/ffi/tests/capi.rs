use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use genlang::corpus::{Gender, GenderLexicon, Ingest, Relation};
use genlang::eval::topk;
use genlang::lexicons::{load_sentiment_lexicon, Sentiment};
use genlang::model::{femaleness, train, Checkpoint, FeatureSpace, Instance, TrainConfig};
use genlang_ffi::*;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

/// Trains a short toy model and writes its checkpoint.
fn checkpoint(dir: &Path, sentiments: usize) -> PathBuf {
    let lex = GenderLexicon::bundled();
    let mut ingest = Ingest::new();
    ingest.file(&data("toy_arcs.txt"), None, &lex).unwrap();
    let table = ingest.table(Relation::Amod).unwrap();
    let prior = load_sentiment_lexicon(data("toy_sentiment.tsv")).unwrap();
    let space = FeatureSpace::from_lexicon(&lex);
    let inst = Instance::new(&table, &lex, &space, Some(&prior)).unwrap();
    let cfg = TrainConfig {
        alpha: 1e-4,
        beta: if sentiments == 3 { 1.0 } else { 0.0 },
        num_sentiments: sentiments,
        max_iterations: 200,
        ..TrainConfig::default()
    };
    let out = train(&inst, &cfg).unwrap();
    let path = dir.join(format!("model-{sentiments}.json"));
    Checkpoint::new(&out.params, &inst, &cfg, None).save(&path).unwrap();
    path
}

fn cstr(p: &Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gl_last_error()) }.to_str().unwrap().to_string()
}

fn load(path: &Path) -> *mut GlModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { gl_model_load(cstr(path).as_ptr(), &mut m) }, GlStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(gl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn model_round_trip_matches_core() {
    let dir = tempfile::tempdir().unwrap();
    let path = checkpoint(dir.path(), 3);
    let ck = Checkpoint::load(&path).unwrap();
    let (params, inst) = (ck.params().unwrap(), ck.instance().unwrap());
    let fem = femaleness(&params, &inst);

    let m = load(&path);
    unsafe {
        assert_eq!(gl_model_num_neighbors(m), inst.neighbors.len());
        assert_eq!(gl_model_num_sentiments(m), 3);
        for (i, w) in inst.neighbors.iter().enumerate() {
            assert_eq!(CStr::from_ptr(gl_model_neighbor(m, i)).to_str().unwrap(), w);
        }
        assert!(gl_model_neighbor(m, inst.neighbors.len()).is_null());

        let word = CString::new(inst.neighbors[0].as_str()).unwrap();
        let mut f = 0.0;
        assert_eq!(gl_model_femaleness(m, word.as_ptr(), &mut f), GlStatus::Ok);
        assert_eq!(f, fem[0]);

        let mut s = 0.0;
        assert_eq!(
            gl_model_score(m, word.as_ptr(), GlGender::Fem, GlSentiment::Neg, &mut s),
            GlStatus::Ok
        );
        assert_eq!(s, params.eta(0, 1, inst.space.gender_index(Gender::Fem)));

        let mut r = ptr::null_mut();
        assert_eq!(gl_topk(m, GlGender::Masc, GlSentiment::Pos, 5, &mut r), GlStatus::Ok);
        let expected = topk(&params, &inst, Gender::Masc, Some(Sentiment::Pos), 5).unwrap();
        assert_eq!(gl_ranking_len(r), 5);
        for (i, (w, sc)) in expected.entries.iter().enumerate() {
            assert_eq!(CStr::from_ptr(gl_ranking_word(r, i)).to_str().unwrap(), w);
            assert_eq!(gl_ranking_score(r, i), *sc);
        }
        assert!(gl_ranking_word(r, 5).is_null());
        assert!(gl_ranking_score(r, 5).is_nan());
        gl_ranking_free(r);
        gl_model_free(m);
    }
}

#[test]
fn sentiment_must_match_model() {
    let dir = tempfile::tempdir().unwrap();
    let m = load(&checkpoint(dir.path(), 1));
    unsafe {
        let word = CStr::from_ptr(gl_model_neighbor(m, 0)).to_owned();
        let mut s = 0.0;
        assert_eq!(
            gl_model_score(m, word.as_ptr(), GlGender::Masc, GlSentiment::None, &mut s),
            GlStatus::Ok
        );
        assert_eq!(
            gl_model_score(m, word.as_ptr(), GlGender::Masc, GlSentiment::Pos, &mut s),
            GlStatus::InvalidArgument
        );
        let mut r = ptr::null_mut();
        assert_eq!(
            gl_topk(m, GlGender::Fem, GlSentiment::Neu, 3, &mut r),
            GlStatus::InvalidArgument
        );
        assert!(r.is_null());
        gl_model_free(m);
    }
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    let missing = CString::new("/nonexistent/model.json").unwrap();
    unsafe {
        assert_eq!(gl_model_load(missing.as_ptr(), &mut m), GlStatus::Io);
        assert!(m.is_null());
        assert!(last_error().contains("/nonexistent/model.json"));
        assert_eq!(gl_model_load(ptr::null(), &mut m), GlStatus::NullPointer);
        assert_eq!(gl_model_load(missing.as_ptr(), ptr::null_mut()), GlStatus::NullPointer);

        let mut f = 0.0;
        assert_eq!(
            gl_model_femaleness(ptr::null(), missing.as_ptr(), &mut f),
            GlStatus::NullPointer
        );
        assert_eq!(gl_model_num_neighbors(ptr::null()), 0);
        gl_model_free(ptr::null_mut());
        gl_ranking_free(ptr::null_mut());
    }

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    unsafe {
        assert_eq!(gl_model_load(cstr(&bad).as_ptr(), &mut m), GlStatus::Data);
    }
}

#[test]
fn unknown_word_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = load(&checkpoint(dir.path(), 1));
    let word = CString::new("zzz-not-a-word").unwrap();
    let mut f = 0.0;
    unsafe {
        assert_eq!(gl_model_femaleness(m, word.as_ptr(), &mut f), GlStatus::Data);
        gl_model_free(m);
    }
    assert!(last_error().contains("zzz-not-a-word"));
}

#[test]
fn spearman_values() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y = [1.0, 3.0, 2.0, 4.0];
    let mut rho = 0.0;
    unsafe {
        assert_eq!(gl_spearman(x.as_ptr(), y.as_ptr(), 4, &mut rho), GlStatus::Ok);
        assert!((rho - 0.8).abs() < 1e-15);
        let c = [1.0; 4];
        assert_eq!(gl_spearman(x.as_ptr(), c.as_ptr(), 4, &mut rho), GlStatus::Data);
        assert_eq!(last_error(), "constant input");
        assert_eq!(gl_spearman(ptr::null(), y.as_ptr(), 4, &mut rho), GlStatus::NullPointer);
    }
}

#[test]
fn permutation_test_exact() {
    let a = [0.0, 0.0];
    let b = [1.0, 1.0];
    let mut r = GlTestResult::default();
    unsafe {
        assert_eq!(
            gl_permutation_test(a.as_ptr(), 2, b.as_ptr(), 2, 1000, 7, &mut r),
            GlStatus::Ok
        );
    }
    assert!(r.exact);
    assert_eq!(r.permutations, 6);
    assert_eq!(r.p_value, 1.0 / 3.0);
    assert_eq!(r.statistic, 1.0);
    unsafe {
        assert_eq!(
            gl_permutation_test(a.as_ptr(), 2, b.as_ptr(), 0, 1000, 7, &mut r),
            GlStatus::InvalidArgument
        );
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/genlang.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "gl_model_load",
        "gl_model_free",
        "gl_model_score",
        "gl_topk",
        "gl_ranking_free",
        "gl_spearman",
        "gl_permutation_test",
        "gl_last_error",
        "typedef struct GlModel GlModel",
        "GL_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"genlang.h\"\nint main(void) { return GL_STATUS_OK; }\n",
    )
    .unwrap();
    match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    {
        Ok(status) => assert!(status.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; skipped the compile check"),
    }
}
