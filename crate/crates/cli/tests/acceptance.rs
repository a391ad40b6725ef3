//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use cxrtriage::datastore::{parse_records, prevalence_stats, write_records};
use cxrtriage::labeler::{label_report, Lexicon};
use cxrtriage::metrics::{
    auroc_exact, condition_data, format_change, operating_point_at_sensitivity, relative_change, roc_curve,
    work_reduction, wr_curve, ConditionEval, EvalOptions, ExactAuc,
};
use cxrtriage::{Condition, EvalReport, Label4, LabelSet, StudyRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("work reduction rows", work_reduction_rows),
        ("aggregate cross-checks", aggregate_cross_checks),
        ("AUROC equals the pairwise statistic", auroc_oracle_equivalence),
        ("operating-point optimality", operating_point_optimality),
        ("synthetic score calibration", synth_calibration),
        ("labeler fixture suite", labeler_fixtures),
        ("pipeline determinism", pipeline_determinism),
        ("table shapes", table_shapes),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {status}: {name} [{secs:.2}s] {detail}", i + 1);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs()));
    }
    Ok(())
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn read_fixture(name: &str) -> Vec<BTreeMap<String, String>> {
    let mut rdr = csv::Reader::from_path(fixture(name)).expect("fixture");
    rdr.deserialize().map(|r| r.expect("fixture row")).collect()
}

fn num(row: &BTreeMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key}: `{}`", row[key]))
}

fn cond(row: &BTreeMap<String, String>) -> Condition {
    row["condition"].parse().expect("condition name")
}

const DATASET_SIZE: u64 = 421_859;

fn positive_fractions() -> BTreeMap<Condition, f64> {
    read_fixture("label_distribution.csv").iter().map(|r| (cond(r), num(r, "positive") / DATASET_SIZE as f64)).collect()
}

fn cli(args: &[&str]) -> Result<String, String> {
    let argv = std::iter::once("cxrtriage").chain(args.iter().copied());
    cxrtriage_cli::run(argv).map_err(|e| format!("`{}` failed: {e}", args.join(" ")))
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

// 1

fn work_reduction_rows() -> Result<String, String> {
    let start = Instant::now();
    let prevalence = positive_fractions();
    let mut misses = Vec::new();
    let mut checks = 0;
    let mut rendered = BTreeMap::new();
    for row in read_fixture("high_sensitivity.csv") {
        let c = cond(&row);
        for model in ["local", "reference"] {
            let spec = num(&row, &format!("{model}_specificity"));
            let printed = num(&row, &format!("{model}_work_reduction"));
            let wr = work_reduction(0.95, spec, prevalence[&c]);
            checks += 1;
            if (wr - printed).abs() > 0.01 {
                misses.push(format!("{c} {model}: {wr:.4} vs {printed}"));
            }
            rendered.insert((c, model), format!("{wr:.3}"));
        }
    }
    within(start, Duration::from_secs(1))?;
    if checks != 26 {
        return Err(format!("expected 26 checks, ran {checks}"));
    }
    let cardio = &rendered[&(Condition::Cardiomegaly, "local")];
    let consol = &rendered[&(Condition::Consolidation, "local")];
    if cardio != "0.616" || consol != "0.874" {
        return Err(format!("Cardiomegaly {cardio} (want 0.616), Consolidation {consol} (want 0.874)"));
    }
    if !misses.is_empty() {
        return Err(misses.join("; "));
    }
    Ok(format!("{checks}/26 within 0.01"))
}

// 2

fn aggregate_cross_checks() -> Result<String, String> {
    let wr = wr_curve(&[(0.95, 0.643)], &[0.142]).map_err(|e| e.to_string())?[0].work_reduction;
    if (wr - 0.559).abs() > 0.001 {
        return Err(format!("work reduction at p=0.142 is {wr:.4}"));
    }
    let mut shown = Vec::new();
    for (base, new, want) in [(0.383, 0.559, 46.0), (0.880, 0.848, -3.8)] {
        let text = format_change(relative_change(base, new).map_err(|e| e.to_string())?);
        let value: f64 = text.trim_end_matches('%').parse().map_err(|_| format!("unparsable `{text}`"))?;
        if (value - want).abs() > 0.1 + 1e-9 {
            return Err(format!("{base} -> {new} renders {text}, want {want:+.1}%"));
        }
        shown.push(text);
    }
    Ok(format!("wr(0.142)={wr:.3}, {}", shown.join(", ")))
}

// 3

/// Tie-corrected pairwise statistic from per-value class counts:
/// `(2 * #(pos > neg) + #(pos = neg)) / (2 * P * N)`.
fn pairwise_auc(pos: &[u32], neg: &[u32]) -> ExactAuc {
    let (mut greater, mut equal) = (0u128, 0u128);
    for (i, &p) in pos.iter().enumerate() {
        for (j, &n) in neg.iter().enumerate() {
            let pairs = p as u128 * n as u128;
            if i > j {
                greater += pairs;
            } else if i == j {
                equal += pairs;
            }
        }
    }
    let (np, nn) = (pos.iter().sum::<u32>() as u128, neg.iter().sum::<u32>() as u128);
    ExactAuc { numerator: 2 * greater + equal, denominator: 2 * np * nn }
}

fn count_vectors(k: usize, max_total: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=remaining {
            prefix.push(v);
            rec(prefix, left - 1, remaining - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), k, max_total, &mut out);
    out.retain(|v| v.iter().sum::<u32>() > 0);
    out
}

fn expand(pos: &[u32], neg: &[u32], values: &[f64], scores: &mut Vec<f64>, truths: &mut Vec<bool>) {
    scores.clear();
    truths.clear();
    for (counts, truth) in [(pos, true), (neg, false)] {
        for (i, &n) in counts.iter().enumerate() {
            for _ in 0..n {
                scores.push(values[i]);
                truths.push(truth);
            }
        }
    }
}

fn auroc_oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let mut scores = Vec::new();
    let mut truths = Vec::new();
    let mut exhaustive = 0u64;
    // An instance is fixed, up to relabeling the score values, by the count of
    // positives and negatives at each of k ordered values. Values unused by
    // both classes are dropped, and (pos, neg) is identified with
    // (reversed neg, reversed pos), which has the same AUROC.
    for k in 1..=5 {
        let values: Vec<f64> = (0..k).map(|i| i as f64).collect();
        let vectors = count_vectors(k, 12);
        for pos in &vectors {
            let rev_pos: Vec<u32> = pos.iter().rev().copied().collect();
            for neg in &vectors {
                if pos.iter().zip(neg).any(|(p, n)| p + n == 0) {
                    continue;
                }
                let rev_neg: Vec<u32> = neg.iter().rev().copied().collect();
                if (&rev_neg, &rev_pos) < (pos, neg) {
                    continue;
                }
                expand(pos, neg, &values, &mut scores, &mut truths);
                let curve = roc_curve(&scores, &truths).map_err(|e| e.to_string())?;
                let got = auroc_exact(&curve);
                if got != pairwise_auc(pos, neg) {
                    return Err(format!("pos {pos:?} neg {neg:?}: {got:?} vs {:?}", pairwise_auc(pos, neg)));
                }
                exhaustive += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xA0C);
    for _ in 0..10_000 {
        let k = rng.random_range(1..=5);
        let mut values: Vec<f64> = (0..k).map(|_| rng.random_range(-5.0..5.0)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let pos: Vec<u32> = random_counts(&mut rng, values.len());
        let neg: Vec<u32> = random_counts(&mut rng, values.len());
        // shuffle record order; the curve must not depend on it
        expand(&pos, &neg, &values, &mut scores, &mut truths);
        let mut order: Vec<usize> = (0..scores.len()).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let s: Vec<f64> = order.iter().map(|&i| scores[i]).collect();
        let t: Vec<bool> = order.iter().map(|&i| truths[i]).collect();
        let got = auroc_exact(&roc_curve(&s, &t).map_err(|e| e.to_string())?);
        if got != pairwise_auc(&pos, &neg) {
            return Err(format!("random pos {pos:?} neg {neg:?} over {values:?}"));
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{exhaustive} exhaustive + 10000 random instances"))
}

fn random_counts(rng: &mut ChaCha8Rng, k: usize) -> Vec<u32> {
    let total = rng.random_range(1..=12);
    let mut counts = vec![0; k];
    for _ in 0..total {
        counts[rng.random_range(0..k)] += 1;
    }
    counts
}

// 4

fn operating_point_optimality() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0B);
    for case in 0..1000 {
        let n = rng.random_range(2..400);
        let levels = rng.random_range(2..60) as f64;
        let mut scores = Vec::with_capacity(n);
        let mut truths = Vec::with_capacity(n);
        for i in 0..n {
            // guarantee both classes
            let t = if i < 2 { i == 0 } else { rng.random_bool(0.3) };
            let shift = if t { rng.random_range(0.0..0.5) } else { 0.0 };
            let s: f64 = (rng.random::<f64>() * 0.7 + shift) * levels;
            scores.push(s.round() / levels);
            truths.push(t);
        }
        let op = operating_point_at_sensitivity(&scores, &truths, 0.95).map_err(|e| e.to_string())?;
        let n_pos = truths.iter().filter(|&&t| t).count();
        let n_neg = n - n_pos;

        // brute-force sweep over every observed score as a threshold
        let sweep = |thr: f64| {
            let tp = scores.iter().zip(&truths).filter(|(s, t)| **t && **s >= thr).count();
            let tn = scores.iter().zip(&truths).filter(|(s, t)| !**t && **s < thr).count();
            (tp, tn)
        };
        let (tp, tn) = sweep(op.threshold);
        if 20 * tp < 19 * n_pos {
            return Err(format!("case {case}: sensitivity {tp}/{n_pos} below 0.95"));
        }
        if op.sensitivity != tp as f64 / n_pos as f64 || op.specificity != tn as f64 / n_neg as f64 {
            return Err(format!("case {case}: reported rates disagree with the sweep"));
        }
        for &thr in &scores {
            let (tp2, tn2) = sweep(thr);
            if 20 * tp2 >= 19 * n_pos && tn2 > tn {
                return Err(format!("case {case}: threshold {thr} has specificity {tn2}/{n_neg} > {tn}/{n_neg}"));
            }
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok("1000 random score sets".into())
}

// 5

const CALIBRATION_TARGETS: [(Condition, f64); 4] = [
    (Condition::Atelectasis, 0.894),
    (Condition::Cardiomegaly, 0.946),
    (Condition::Consolidation, 0.954),
    (Condition::PleuralEffusion, 0.985),
];
const CALIBRATION_DEFAULT: f64 = 0.914;

fn synth_calibration() -> Result<String, String> {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut conditions = serde_json::Map::new();
    for (c, t) in CALIBRATION_TARGETS {
        conditions.insert(c.name().into(), serde_json::json!({"target_auroc": t, "disease_ratio": 0.5}));
    }
    let spec = serde_json::json!({
        "n_records": 50_000,
        "seed": 2024,
        "default": {"target_auroc": CALIBRATION_DEFAULT, "disease_ratio": 0.5},
        "conditions": conditions,
    });
    let spec_path = dir.path().join("spec.json");
    fs::write(&spec_path, spec.to_string()).map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        cli(&["synth", "--spec", path_str(&spec_path), "--out", path_str(out)])?;
    }
    let bytes = fs::read(&a).map_err(|e| e.to_string())?;
    if bytes != fs::read(&b).map_err(|e| e.to_string())? {
        return Err("same seed produced different CSVs".into());
    }
    let records = parse_records(bytes.as_slice()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut report = Vec::new();
    for c in Condition::OBSERVED {
        let target = CALIBRATION_TARGETS.iter().find(|(t, _)| *t == c).map_or(CALIBRATION_DEFAULT, |&(_, t)| t);
        let d = condition_data(&records, c, Default::default()).map_err(|e| e.to_string())?;
        let auc = auroc_exact(&roc_curve(&d.scores, &d.truths).map_err(|e| e.to_string())?).value();
        worst = worst.max((auc - target).abs());
        if (auc - target).abs() > 0.01 {
            return Err(format!("{c}: empirical {auc:.4} vs target {target}"));
        }
        if target != CALIBRATION_DEFAULT {
            report.push(format!("{target}->{auc:.3}"));
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{}; worst gap {worst:.4}; byte-identical reruns", report.join(" ")))
}

// 6

struct LabelCase {
    report: String,
    expected: LabelSet,
}

fn label_cases() -> Vec<LabelCase> {
    let text = fs::read_to_string(fixture("labeler_cases.tsv")).expect("labeler fixture");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|line| {
            let (report, expected) = line.split_once('\t').expect("report<TAB>labels");
            let mut labels = LabelSet::default();
            for item in expected.split_whitespace() {
                let (c, l) = item.split_once('=').expect("Condition=LABEL");
                labels[c.parse::<Condition>().expect("condition")] = l.parse::<Label4>().expect("label");
            }
            LabelCase { report: report.to_string(), expected: labels }
        })
        .collect()
}

fn diff(got: &LabelSet, want: &LabelSet) -> String {
    Condition::ALL
        .into_iter()
        .filter(|&c| got[c] != want[c])
        .map(|c| format!("{c}: got {} want {}", got[c].code(), want[c].code()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn check_structure(records: &[StudyRecord], what: &str) -> Result<(), String> {
    let table = prevalence_stats(records).map_err(|e| format!("{what}: {e}"))?;
    for row in &table.rows {
        if row.sum() != table.total {
            return Err(format!("{what}: {} counts sum to {} of {}", row.condition, row.sum(), table.total));
        }
    }
    let nf = table.row(Condition::NoFinding).ok_or("no NoFinding row")?;
    if nf.negative != 0 || nf.uncertain != 0 {
        return Err(format!("{what}: NoFinding has Negative or Uncertain labels"));
    }
    Ok(())
}

fn labeler_fixtures() -> Result<String, String> {
    let cases = label_cases();
    if cases.len() < 50 {
        return Err(format!("only {} cases", cases.len()));
    }
    let lexicon = Lexicon::bundled();
    let mut failures = Vec::new();
    let mut stages = [false; 3];
    let mut precedence = false;
    let mut seen = std::collections::HashMap::new();
    for (i, case) in cases.iter().enumerate() {
        let got = label_report(&case.report, &lexicon);
        if got.labels != case.expected {
            failures.push(format!("#{} `{}`: {}", i + 1, case.report, diff(&got.labels, &case.expected)));
        }
        for m in &got.mentions {
            for (slot, prefix) in ["pre_neg:", "post_neg:", "uncertain:"].iter().enumerate() {
                stages[slot] |= m.rule_fired.starts_with(prefix);
            }
            precedence |= got.mentions.iter().any(|o| o.condition == m.condition && o.polarity != m.polarity);
        }
        for c in Condition::ALL {
            *seen.entry((c, case.expected[c])).or_insert(0) += 1;
        }
    }
    if !failures.is_empty() {
        return Err(failures.join("; "));
    }
    let unseen: Vec<Condition> = Condition::OBSERVED
        .into_iter()
        .filter(|&c| !seen.contains_key(&(c, Label4::Positive)) && !seen.contains_key(&(c, Label4::Negative)))
        .collect();
    if !unseen.is_empty() {
        return Err(format!("conditions never labeled: {unseen:?}"));
    }
    if !stages.iter().all(|&s| s) || !precedence {
        return Err(format!("coverage gap: cue stages {stages:?}, precedence {precedence}"));
    }
    for l in [Label4::Positive, Label4::NoMention] {
        if !seen.contains_key(&(Condition::NoFinding, l)) {
            return Err(format!("NoFinding never {}", l.code()));
        }
    }

    // the same cases through the command line, plus a synthetic corpus
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("reports.csv");
    let records: Vec<StudyRecord> = cases
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut r = StudyRecord::new(format!("case{i:03}"));
            r.report_text = Some(c.report.clone());
            r
        })
        .collect();
    let mut buf = Vec::new();
    write_records(&records, &mut buf).map_err(|e| e.to_string())?;
    fs::write(&input, buf).map_err(|e| e.to_string())?;
    let out = dir.path().join("labels.csv");
    cli(&["label", "--reports", path_str(&input), "--out", path_str(&out)])?;
    let labeled = parse_records(fs::read(&out).map_err(|e| e.to_string())?.as_slice()).map_err(|e| e.to_string())?;
    for (r, case) in labeled.iter().zip(&cases) {
        if r.labels.as_ref() != Some(&case.expected) {
            return Err(format!("command-line labels differ for `{}`", case.report));
        }
    }
    check_structure(&labeled, "fixture labels")?;

    let syn = dir.path().join("syn.csv");
    let syn_labels = dir.path().join("syn_labels.csv");
    cli(&["synth", "--n-records", "500", "--seed", "3", "--target-auroc", "0.8", "--disease-ratio", "0.1"])
        .err()
        .ok_or("synth without --out should fail")?;
    cli(&[
        "synth",
        "--n-records",
        "500",
        "--seed",
        "3",
        "--target-auroc",
        "0.8",
        "--disease-ratio",
        "0.1",
        "--emit-reports",
        "--out",
        path_str(&syn),
    ])?;
    cli(&["label", "--reports", path_str(&syn), "--out", path_str(&syn_labels)])?;
    let syn_records =
        parse_records(fs::read(&syn_labels).map_err(|e| e.to_string())?.as_slice()).map_err(|e| e.to_string())?;
    check_structure(&syn_records, "synthetic labels")?;

    Ok(format!("{} hand-traced reports; structural invariants hold", cases.len()))
}

// 7

fn run_pipeline(dir: &Path, threads: Option<&str>) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let p = |name: &str| dir.join(name).to_str().expect("utf-8").to_string();
    let mut global = Vec::new();
    if let Some(t) = threads {
        global = vec!["--threads".to_string(), t.to_string()];
    }
    let run = |args: Vec<String>| {
        let all: Vec<&str> = global.iter().map(String::as_str).chain(args.iter().map(String::as_str)).collect();
        cli(&all)
    };
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    run([
        s(&["synth", "--n-records", "3000", "--seed", "11", "--target-auroc", "0.85"]),
        s(&["--disease-ratio", "0.15", "--emit-reports", "--out"]),
        vec![p("corpus.csv")],
    ]
    .concat())?;
    run([
        s(&["label", "--reports"]),
        vec![p("corpus.csv")],
        s(&["--out"]),
        vec![p("labels.csv")],
        s(&["--audit-out"]),
        vec![p("audit.jsonl")],
    ]
    .concat())?;
    run([s(&["split", "--seed", "5", "--records"]), vec![p("labels.csv")], s(&["--out"]), vec![p("split.csv")]]
        .concat())?;
    run([
        s(&["eval", "--records"]),
        vec![p("labels.csv")],
        s(&["--split-file"]),
        vec![p("split.csv")],
        s(&["--report-out"]),
        vec![p("report.json")],
        s(&["--table-out"]),
        vec![p("table.csv")],
        s(&["--roc-out"]),
        vec![p("roc")],
    ]
    .concat())?;

    let prefix = dir.to_str().expect("utf-8");
    let mut files = BTreeMap::new();
    collect_files(dir, dir, &mut files)?;
    for (name, bytes) in files.iter_mut() {
        if name.ends_with(".manifest.json") {
            let text = String::from_utf8(bytes.clone()).map_err(|e| e.to_string())?;
            *bytes = text.replace(prefix, "<run>").into_bytes();
        }
    }
    Ok(files)
}

fn collect_files(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) -> Result<(), String> {
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else {
            let rel = path.strip_prefix(root).expect("inside root").display().to_string();
            out.insert(rel, fs::read(&path).map_err(|e| e.to_string())?);
        }
    }
    Ok(())
}

fn pipeline_determinism() -> Result<String, String> {
    let dirs: Vec<tempfile::TempDir> = (0..3).map(|_| tempfile::tempdir().expect("tempdir")).collect();
    let a = run_pipeline(dirs[0].path(), None)?;
    let b = run_pipeline(dirs[1].path(), None)?;
    let c = run_pipeline(dirs[2].path(), Some("4"))?;
    for (label, other) in [("rerun", &b), ("4 threads", &c)] {
        if a.keys().ne(other.keys()) {
            return Err(format!("{label}: different file sets"));
        }
        if let Some(name) = a.keys().find(|k| a[*k] != other[*k]) {
            return Err(format!("{label}: {name} differs"));
        }
    }
    Ok(format!("{} files byte-identical across 3 runs", a.len()))
}

// 8

fn table_shapes() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let rows = read_fixture("label_distribution.csv");

    let mut records: Vec<StudyRecord> = (0..DATASET_SIZE).map(|i| StudyRecord::new(format!("s{i:06}"))).collect();
    for r in &mut records {
        r.labels = Some(LabelSet::default());
    }
    for row in &rows {
        let c = cond(row);
        let mut at = 0usize;
        for (key, label) in [
            ("positive", Label4::Positive),
            ("negative", Label4::Negative),
            ("uncertain", Label4::Uncertain),
            ("no_mention", Label4::NoMention),
        ] {
            let n = num(row, key) as usize;
            for r in &mut records[at..at + n] {
                r.labels.as_mut().expect("set")[c] = label;
            }
            at += n;
        }
        if at as u64 != DATASET_SIZE {
            return Err(format!("{c}: fixture counts sum to {at}"));
        }
    }
    let input = dir.path().join("labels.csv");
    let mut buf = Vec::new();
    write_records(&records, &mut buf).map_err(|e| e.to_string())?;
    drop(records);
    fs::write(&input, buf).map_err(|e| e.to_string())?;
    let stats = dir.path().join("stats.csv");
    cli(&["stats", "--records", path_str(&input), "--out", path_str(&stats)])?;

    let rendered: BTreeMap<String, BTreeMap<String, String>> = csv::Reader::from_path(&stats)
        .map_err(|e| e.to_string())?
        .deserialize::<BTreeMap<String, String>>()
        .map(|r| r.map(|r| (r["condition"].clone(), r)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut cells = 0;
    let mut mismatches = Vec::new();
    for row in &rows {
        let got = rendered.get(&row["condition"]).ok_or_else(|| format!("no row for {}", row["condition"]))?;
        for key in ["positive", "negative", "uncertain", "no_mention"] {
            let col = format!("{key}_pct");
            cells += 1;
            if got[&col] != row[&col] {
                mismatches.push(format!("{} {key}: rendered {} vs printed {}", row["condition"], got[&col], row[&col]));
            }
            if got[key] != row[key] {
                return Err(format!("{} {key}: count {} vs {}", row["condition"], got[key], row[key]));
            }
        }
    }

    // model comparison on the published AUROCs
    let prevalence = positive_fractions();
    let spec_rows: BTreeMap<Condition, BTreeMap<String, String>> =
        read_fixture("high_sensitivity.csv").into_iter().map(|r| (cond(&r), r)).collect();
    let mut paths = Vec::new();
    for (model, auroc_col, prefix) in
        [("reference", "reference_thai", "reference"), ("locally-adapted", "local_thai", "local")]
    {
        let eval_rows = read_fixture("auroc.csv")
            .iter()
            .map(|r| {
                let c = cond(r);
                let s = &spec_rows[&c];
                ConditionEval::summary(
                    c,
                    num(r, auroc_col),
                    0.95,
                    num(s, &format!("{prefix}_specificity")),
                    prevalence[&c],
                    num(s, &format!("{prefix}_work_reduction")),
                )
            })
            .collect();
        let options = EvalOptions { dataset_id: "thai-cxr".into(), model_id: model.into(), ..Default::default() };
        let report = EvalReport::from_rows(&options, eval_rows).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("{model}.json"));
        fs::write(&path, serde_json::to_vec(&report).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        paths.push(path);
    }
    let cmp = dir.path().join("compare.csv");
    let summary = cli(&[
        "compare",
        "--report-a",
        path_str(&paths[0]),
        "--report-b",
        path_str(&paths[1]),
        "--out",
        path_str(&cmp),
    ])?;
    let mut rdr = csv::Reader::from_path(&cmp).map_err(|e| e.to_string())?;
    let better: Vec<String> = rdr
        .deserialize::<BTreeMap<String, String>>()
        .filter_map(|r| r.ok())
        .filter(|r| !r["row"].starts_with("mean"))
        .map(|r| r["better"].clone())
        .collect();
    if better.len() != 13
        || better.iter().any(|b| b != "locally-adapted")
        || !summary.contains("locally-adapted wins 13/13")
    {
        return Err(format!("comparison: {better:?}"));
    }

    if !mismatches.is_empty() {
        return Err(format!(
            "{}/{cells} percentages match; {}; comparison: locally-adapted wins 13/13",
            cells - mismatches.len(),
            mismatches.join("; ")
        ));
    }
    Ok(format!("{cells}/{cells} percentages match; locally-adapted wins 13/13"))
}
