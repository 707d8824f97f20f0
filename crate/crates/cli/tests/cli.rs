use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const G0: &str = "\
N x1 X
N x2 X
N y1 Y
N y2 Y
N y3 Y
N z1 Z
N z2 Z
E x1 y1
E x1 y2
E x2 y2
E x2 y3
E y1 z1
E y2 z1
E y3 z2
";

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("g0.graph", G0);
        f
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_graphview"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(o: Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn ingest_and_schema() {
    let f = Fixture::new();
    assert_eq!(
        ok(f.run(&["ingest", "--graph", "g0.graph"])),
        "{\"vertices\":7,\"edges\":7,\"labels\":3,\"duplicate_edges\":0,\"self_loops\":0}\n"
    );
    ok(f.run(&["ingest", "--graph", "g0.graph", "--out", "canon.graph"]));
    assert_eq!(std::fs::read_to_string(f.path("canon.graph")).unwrap(), G0);
    assert_eq!(ok(f.run(&["schema", "--graph", "g0.graph"])), "labels: X Y Z\nX -> Y\nY -> Z\n");
}

#[test]
fn view_is_minimal_by_default() {
    let f = Fixture::new();
    let out = ok(f.run(&["view", "--graph", "g0.graph", "--filter", "x1", "--lc", "Z", "--lb", "Y"]));
    assert_eq!(
        out,
        "{\"l_c\":[\"Z\"],\"l_b\":[\"Y\"],\"filter\":[\"x1\"],\"vertices\":[{\"id\":\"z1\",\"label\":\"Z\",\"weight\":2,\"support\":[\"y1\",\"y2\"]}],\"edges\":[]}\n"
    );
    let full = ok(f.run(&["view", "--graph", "g0.graph", "--filter", "x1", "--lc", "Z", "--lb", "Y", "--full"]));
    assert!(full.contains("{\"id\":\"z2\",\"label\":\"Z\",\"weight\":0,\"support\":[]}"));
}

#[test]
fn view_matches_engine_bytes() {
    use graphview_core::{label_set, parse_graph, EdgeMode, Filter, NavState, Navigator};
    use std::sync::Arc;
    let f = Fixture::new();
    let g = Arc::new(parse_graph(G0).unwrap().0);
    let s = NavState::new(Filter::new(&g, ["x2"]).unwrap(), label_set(["X"]), label_set(["Y"])).unwrap();
    let expected = Navigator::new(g, s, EdgeMode::Undirected).unwrap().document(false).to_json();
    let out = ok(f.run(&["view", "--graph", "g0.graph", "--filter", "x2", "--lc", "X", "--lb", "Y"]));
    assert_eq!(out, format!("{expected}\n"));
}

#[test]
fn walk_script() {
    let f = Fixture::new();
    f.write("walk.txt", "navigate Z;Y\nselect z1\nexpand Z\n");
    let out = ok(f.run(&[
        "walk", "--graph", "g0.graph", "--filter", "x1", "--lc", "X", "--lb", "Y", "--script", "walk.txt",
    ]));
    let mut lines = out.lines();
    let view = lines.next().unwrap();
    assert!(view.starts_with("{\"l_c\":[\"Z\"],\"l_b\":[\"Y\"],\"filter\":[\"x1\"]"));
    let history: Vec<&str> = lines.collect();
    let steps: Vec<&str> = history.iter().copied().skip_while(|l| *l != "# steps").skip(1).collect();
    assert_eq!(steps.len(), 3);
    let last_target = steps[2].split(' ').nth(2).unwrap();
    let row = history.iter().find(|l| l.starts_with(last_target)).unwrap();
    assert!(row.ends_with("F=x1 LC=Z LB=Y"), "{row}");
    assert_eq!(
        steps.iter().map(|s| s.split(' ').nth(1).unwrap()).collect::<Vec<_>>(),
        ["eta", "sigma", "xi"]
    );

    ok(f.run(&[
        "walk", "--graph", "g0.graph", "--filter", "x1", "--lc", "X", "--lb", "Y", "--script", "walk.txt", "--out",
        "walk.out",
    ]));
    assert_eq!(std::fs::read_to_string(f.path("walk.out")).unwrap(), out);
}

#[test]
fn dot_export() {
    let f = Fixture::new();
    let dot = ok(f.run(&["dot", "--graph", "g0.graph", "--lc", "X", "--lb", "Y"]));
    assert_eq!(
        dot,
        "graph view {\n  \"x1\" [label=\"x1 (2)\"];\n  \"x2\" [label=\"x2 (2)\"];\n  \"x1\" -- \"x2\" [label=\"1\", penwidth=1];\n}\n"
    );
    ok(f.run(&["view", "--graph", "g0.graph", "--lc", "X", "--lb", "Y", "--out", "v.json"]));
    assert_eq!(ok(f.run(&["dot", "--view", "v.json"])), dot);

    // z2 has no bridge through x1, so the minimal view is empty
    let empty = ok(f.run(&["dot", "--graph", "g0.graph", "--filter", "x1,z2", "--lc", "Z", "--lb", "Y"]));
    assert_eq!(empty, "graph view {\n}\n");
}

#[test]
fn matches_listing() {
    let f = Fixture::new();
    let out = ok(f.run(&["matches", "--graph", "g0.graph", "--filter", "x1", "--lc", "Z", "--lb", "Y"]));
    assert!(out.starts_with("pattern{vertices=[X,Y,Z]"), "{out}");
    assert!(out.contains("(2 matches)"), "{out}");
}

#[test]
fn oracle_passes_on_fixture() {
    let f = Fixture::new();
    for mode in ["--undirected", "--directed"] {
        let out = ok(f.run(&["oracle", "--graph", "g0.graph", mode]));
        assert!(out.trim_end().ends_with(", 0 failed"), "{out}");
    }
}

#[test]
fn exit_codes() {
    let f = Fixture::new();
    f.write("bad.graph", "N x1 X\nE x1\n");
    let o = f.run(&["schema", "--graph", "bad.graph"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    f.write("hidden.txt", "select z2\n");
    let o = f.run(&["walk", "--graph", "g0.graph", "--filter", "x1", "--lc", "Z", "--lb", "Y", "--script", "hidden.txt"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("script line 1"));

    f.write("typo.txt", "selct z1\n");
    let o = f.run(&["walk", "--graph", "g0.graph", "--lc", "Z", "--lb", "Y", "--script", "typo.txt"]);
    assert_eq!(code(&o), 2);

    let o = f.run(&["view", "--graph", "g0.graph", "--lc", "X", "--lb", "X"]);
    assert_eq!(code(&o), 3);
    let o = f.run(&["view", "--graph", "g0.graph", "--filter", "q9", "--lc", "X", "--lb", "Y"]);
    assert_eq!(code(&o), 3);

    let o = f.run(&["schema", "--graph", "missing.graph"]);
    assert_eq!(code(&o), 4);
    assert!(!Path::new("missing.graph").exists());
}
