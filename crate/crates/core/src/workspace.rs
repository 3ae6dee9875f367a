//! On-disk workspaces: a `workspace.toml`, a DDL file, a rule file, one CSV
//! per relation, and an output directory with `view.nq` and numbered
//! changeset folders.
//!
//! ```toml
//! schema = "schema.sql"
//! rules = "rules.rtr"
//! data = "data"
//! output = "out"
//! minimize = false
//! exclude_rules = []
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{Map, Value as Json};
use thiserror::Error;

use crate::changeset::{compute_changeset, emit_trigger_sql, Changeset, ChangesetError};
use crate::ddl::{parse_ddl, DdlError};
use crate::fixtures;
use crate::materialize::materialize_view;
use crate::rdf::{parse_nquads, QuadDataset};
use crate::relational::{
    AttrType, DatabaseState, RelationScheme, RelationalError, RelationalSchema, Tuple, Update,
    Value,
};
use crate::rules::{parse_rules, RuleError, RuleSet};
use crate::verify::{run_campaign, verify_changeset};

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{path}:{source}")]
    Ddl { path: PathBuf, source: DdlError },
    #[error("{path}:{source}")]
    Rules { path: PathBuf, source: RuleError },
    #[error("{path}:{line}: {message}")]
    Csv {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    Update { path: PathBuf, message: String },
    #[error(transparent)]
    Relational(#[from] RelationalError),
    #[error(transparent)]
    Changeset(#[from] ChangesetError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> WorkspaceError + '_ {
    move |source| WorkspaceError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceConfig {
    pub schema: PathBuf,
    pub rules: PathBuf,
    pub data: PathBuf,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub minimize: bool,
    #[serde(default)]
    pub exclude_rules: Vec<String>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// A loaded workspace. Relative paths in the config resolve against `root`.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub root: PathBuf,
    pub config: WorkspaceConfig,
    pub schema: Arc<RelationalSchema>,
    pub rules: RuleSet,
    pub state: DatabaseState,
}

impl Workspace {
    pub fn load(root: impl AsRef<Path>) -> Result<Workspace, WorkspaceError> {
        let root = root.as_ref().to_path_buf();
        let cfg_path = root.join("workspace.toml");
        let text = fs::read_to_string(&cfg_path).map_err(io_err(&cfg_path))?;
        let config: WorkspaceConfig =
            toml::from_str(&text).map_err(|e| WorkspaceError::Config {
                path: cfg_path.clone(),
                message: e.to_string(),
            })?;

        let schema_path = root.join(&config.schema);
        let ddl = fs::read_to_string(&schema_path).map_err(io_err(&schema_path))?;
        let schema = Arc::new(parse_ddl(&ddl).map_err(|source| WorkspaceError::Ddl {
            path: schema_path.clone(),
            source,
        })?);

        let rules_path = root.join(&config.rules);
        let rtr = fs::read_to_string(&rules_path).map_err(io_err(&rules_path))?;
        let rules_err = |source| WorkspaceError::Rules {
            path: rules_path.clone(),
            source,
        };
        let mut rules = parse_rules(&rtr, Arc::clone(&schema)).map_err(rules_err)?;
        if !config.exclude_rules.is_empty() {
            rules = rules.without(&config.exclude_rules).map_err(rules_err)?;
        }

        let state = load_state(&schema, &root.join(&config.data))?;
        Ok(Workspace {
            root,
            config,
            schema,
            rules,
            state,
        })
    }

    pub fn data_dir(&self) -> PathBuf {
        self.root.join(&self.config.data)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.root.join(&self.config.output)
    }

    pub fn changesets_dir(&self) -> PathBuf {
        self.output_dir().join("changesets")
    }

    /// Sequence numbers of the changeset folders written so far.
    pub fn changeset_sequence(&self) -> Result<Vec<u64>, WorkspaceError> {
        let dir = self.changesets_dir();
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let mut seqs = Vec::new();
        for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
            let entry = entry.map_err(io_err(&dir))?;
            if let Some(n) = entry
                .file_name()
                .to_str()
                .and_then(|s| s.parse::<u64>().ok())
            {
                seqs.push(n);
            }
        }
        seqs.sort_unstable();
        Ok(seqs)
    }
}

/// Reads every `<Relation>.csv` in `dir`; missing files are empty relations.
pub fn load_state(
    schema: &Arc<RelationalSchema>,
    dir: &Path,
) -> Result<DatabaseState, WorkspaceError> {
    let mut rels = Vec::new();
    if dir.exists() {
        for entry in fs::read_dir(dir).map_err(io_err(dir))? {
            let path = entry.map_err(io_err(dir))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("csv") {
                continue;
            }
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            let Some(scheme) = schema.relation(&name) else {
                return Err(WorkspaceError::Csv {
                    path,
                    line: 1,
                    message: format!("no relation named `{name}`"),
                });
            };
            let file = fs::File::open(&path).map_err(io_err(&path))?;
            let tuples = read_relation_csv(scheme, file).map_err(|e| e.at(&path))?;
            rels.push((name, tuples));
        }
    }
    Ok(DatabaseState::from_relations(Arc::clone(schema), rels)?)
}

/// A CSV problem before the file name is known.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct CsvError {
    pub line: u64,
    pub message: String,
}

impl CsvError {
    fn at(self, path: &Path) -> WorkspaceError {
        WorkspaceError::Csv {
            path: path.to_path_buf(),
            line: self.line,
            message: self.message,
        }
    }
}

/// Parses CSV with a header row naming every attribute of `scheme` once.
/// An empty field is NULL.
pub fn read_relation_csv(
    scheme: &RelationScheme,
    input: impl Read,
) -> Result<BTreeSet<Tuple>, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let csv_err = |e: csv::Error| CsvError {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let mut columns = Vec::with_capacity(headers.len());
    for h in headers.iter() {
        let attr = scheme.attribute(h).ok_or_else(|| CsvError {
            line: 1,
            message: format!("`{}` has no attribute `{h}`", scheme.name),
        })?;
        if columns.iter().any(|(n, _): &(String, AttrType)| n == h) {
            return Err(CsvError {
                line: 1,
                message: format!("column `{h}` appears twice"),
            });
        }
        columns.push((h.to_string(), attr.ty));
    }
    if let Some(missing) = scheme
        .attributes
        .iter()
        .find(|a| !columns.iter().any(|(n, _)| *n == a.name))
    {
        return Err(CsvError {
            line: 1,
            message: format!("missing column `{}`", missing.name),
        });
    }
    let mut out = BTreeSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut t = Tuple::default();
        for ((name, ty), raw) in columns.iter().zip(rec.iter()) {
            let v = Value::parse(*ty, raw).map_err(|message| CsvError {
                line,
                message: format!("{name}: {message}"),
            })?;
            t.set(name.clone(), v);
        }
        if !out.insert(t) {
            return Err(CsvError {
                line,
                message: "duplicate row".into(),
            });
        }
    }
    Ok(out)
}

/// Writes `tuples` as CSV in attribute order; NULL becomes an empty field.
pub fn write_relation_csv(scheme: &RelationScheme, tuples: &BTreeSet<Tuple>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(scheme.attributes.iter().map(|a| a.name.as_str()))
        .expect("in-memory write");
    for t in tuples {
        w.write_record(
            scheme
                .attributes
                .iter()
                .map(|a| t.get(&a.name).lexical().unwrap_or_default()),
        )
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn json_tuple(scheme: &RelationScheme, obj: &Json) -> Result<Tuple, String> {
    let Json::Object(map) = obj else {
        return Err(format!("expected a tuple object, found {obj}"));
    };
    let mut t = Tuple::default();
    for (k, v) in map {
        let attr = scheme
            .attribute(k)
            .ok_or_else(|| format!("`{}` has no attribute `{k}`", scheme.name))?;
        let value = match (v, attr.ty) {
            (Json::Null, _) => Value::Null,
            (Json::Number(n), AttrType::Integer) => Value::Int(
                n.as_i64()
                    .ok_or_else(|| format!("{k}: `{n}` is not an INTEGER"))?,
            ),
            (Json::String(s), ty) => {
                if s.is_empty() && ty != AttrType::Integer {
                    Value::text("")
                } else {
                    Value::parse(ty, s).map_err(|e| format!("{k}: {e}"))?
                }
            }
            (other, ty) => return Err(format!("{k}: {other} is not a {ty} value")),
        };
        t.set(k.clone(), value);
    }
    Ok(t.completed(scheme))
}

/// Parses `{"relation": R, "delete": [..], "insert": [..]}`. Attributes a
/// tuple object leaves out are NULL.
pub fn parse_update_json(schema: &RelationalSchema, text: &str) -> Result<Update, String> {
    let v: Json = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let Json::Object(map) = &v else {
        return Err("expected a JSON object".into());
    };
    for k in map.keys() {
        if !matches!(k.as_str(), "relation" | "delete" | "insert") {
            return Err(format!("unexpected key `{k}`"));
        }
    }
    let rel = map
        .get("relation")
        .and_then(Json::as_str)
        .ok_or("missing string field `relation`")?;
    let scheme = schema
        .relation(rel)
        .ok_or_else(|| format!("unknown relation `{rel}`"))?;
    let list = |key: &str| -> Result<Vec<Tuple>, String> {
        match map.get(key) {
            None => Ok(Vec::new()),
            Some(Json::Array(items)) => items.iter().map(|o| json_tuple(scheme, o)).collect(),
            Some(other) => Err(format!("`{key}` must be an array, found {other}")),
        }
    };
    Ok(Update::new(rel, list("delete")?, list("insert")?))
}

fn tuple_json(scheme: &RelationScheme, t: &Tuple) -> Json {
    let mut m = Map::new();
    for a in &scheme.attributes {
        let v = match t.get(&a.name) {
            Value::Null => Json::Null,
            Value::Int(i) => Json::from(*i),
            Value::Text(s) => Json::from(s.as_str()),
        };
        m.insert(a.name.clone(), v);
    }
    Json::Object(m)
}

/// The update in the input format, with every attribute spelled out.
pub fn update_to_json(schema: &RelationalSchema, u: &Update) -> Json {
    let scheme = schema
        .relation(u.relation())
        .expect("update relation exists");
    serde_json::json!({
        "relation": u.relation(),
        "delete": u.deletes().iter().map(|t| tuple_json(scheme, t)).collect::<Vec<_>>(),
        "insert": u.inserts().iter().map(|t| tuple_json(scheme, t)).collect::<Vec<_>>(),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), WorkspaceError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

/// Writes `view.nq` and returns its path.
pub fn cmd_materialize(ws: &Workspace) -> Result<(PathBuf, QuadDataset), WorkspaceError> {
    let view = materialize_view(&ws.state, &ws.rules);
    let path = ws.output_dir().join("view.nq");
    let tmp = ws.output_dir().join(".view.nq.tmp");
    write_file(&tmp, &view.to_nquads())?;
    fs::rename(&tmp, &path).map_err(io_err(&path))?;
    Ok((path, view))
}

/// Result of [`cmd_apply`].
#[derive(Debug, Clone)]
pub struct Applied {
    pub sequence: u64,
    pub folder: PathBuf,
    pub changeset: Changeset,
}

/// Computes the changeset of the update in `update_file`, writes
/// `changesets/<seq>/{removed.nq, added.nq, update.json}` and advances the
/// data directory to the new state. Nothing is written if the update does
/// not apply.
pub fn cmd_apply(
    ws: &mut Workspace,
    update_file: &Path,
    minimize: Option<bool>,
) -> Result<Applied, WorkspaceError> {
    let text = fs::read_to_string(update_file).map_err(io_err(update_file))?;
    let u = parse_update_json(&ws.schema, &text).map_err(|message| WorkspaceError::Update {
        path: update_file.to_path_buf(),
        message,
    })?;
    let state1 = ws.state.apply(&u)?;
    let mut cs = compute_changeset(&u, &ws.state, &ws.rules)?;
    if minimize.unwrap_or(ws.config.minimize) {
        cs = cs.minimized();
    }

    let sequence = ws.changeset_sequence()?.last().copied().unwrap_or(0) + 1;
    let dir = ws.changesets_dir();
    let folder = dir.join(sequence.to_string());
    let staging = dir.join(format!(".staging-{sequence}"));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
    }
    write_file(&staging.join("removed.nq"), &cs.delta_minus.to_nquads())?;
    write_file(&staging.join("added.nq"), &cs.delta_plus.to_nquads())?;
    let echo = serde_json::to_string_pretty(&update_to_json(&ws.schema, &u)).expect("json");
    write_file(&staging.join("update.json"), &format!("{echo}\n"))?;

    let scheme = ws.schema.relation(u.relation()).expect("checked by apply");
    let data_file = ws.data_dir().join(format!("{}.csv", u.relation()));
    let data_tmp = ws.data_dir().join(format!(".{}.csv.tmp", u.relation()));
    write_file(
        &data_tmp,
        &write_relation_csv(scheme, state1.relation(u.relation())?),
    )?;

    fs::rename(&staging, &folder).map_err(io_err(&folder))?;
    fs::rename(&data_tmp, &data_file).map_err(io_err(&data_file))?;
    ws.state = state1;
    Ok(Applied {
        sequence,
        folder,
        changeset: cs,
    })
}

/// Options of [`cmd_verify`].
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub fixtures: bool,
    pub random: Option<usize>,
    pub seed: u64,
    pub size: usize,
}

/// Checks the bundled case study and/or a random campaign. Returns whether
/// everything passed and a JSON report.
pub fn cmd_verify(
    ws: Option<&Workspace>,
    opts: &VerifyOptions,
) -> Result<(bool, Json), WorkspaceError> {
    let mut passed = true;
    let mut report = Map::new();
    if opts.fixtures || opts.random.is_none() {
        let (ok, json) = verify_fixtures()?;
        passed &= ok;
        report.insert("fixtures".into(), json);
    }
    if let Some(n) = opts.random {
        let bundled;
        let rules = match ws {
            Some(ws) => &ws.rules,
            None => {
                bundled = fixtures::rules();
                &bundled
            }
        };
        let campaign = run_campaign(rules, n, opts.seed, opts.size)?;
        passed &= campaign.all_passed();
        report.insert(
            "campaign".into(),
            serde_json::to_value(&campaign).expect("json"),
        );
    }
    report.insert("passed".into(), Json::Bool(passed));
    Ok((passed, Json::Object(report)))
}

fn verify_fixtures() -> Result<(bool, Json), WorkspaceError> {
    let s0 = fixtures::sigma0();
    let u = fixtures::example_update();
    let mut checks = Map::new();
    let mut passed = true;

    let worked = fixtures::worked_example_rules();
    let cs = compute_changeset(&u, &s0, &worked)?;
    let rep = verify_changeset(&s0, &u, &worked, &cs)?;
    let expected_minus = parse_nquads(fixtures::DELTA_MINUS_NQ).expect("bundled n-quads");
    let expected_plus = parse_nquads(fixtures::DELTA_PLUS_NQ).expect("bundled n-quads");
    let published = cs.delta_minus == expected_minus && cs.delta_plus == expected_plus;
    passed &= rep.passed && published;
    checks.insert("worked_example".into(), rep.to_json());
    checks.insert("matches_published_changeset".into(), Json::Bool(published));

    let all = fixtures::rules();
    let cs = compute_changeset(&u, &s0, &all)?;
    let rep = verify_changeset(&s0, &u, &all, &cs)?;
    passed &= rep.passed;
    checks.insert("all_rules".into(), rep.to_json());

    let inverse = u.inverse();
    let s1 = s0.apply(&u)?;
    let cs = compute_changeset(&inverse, &s1, &all)?;
    let rep = verify_changeset(&s1, &inverse, &all, &cs)?;
    passed &= rep.passed;
    checks.insert("inverse_update".into(), rep.to_json());

    checks.insert("passed".into(), Json::Bool(passed));
    Ok((passed, Json::Object(checks)))
}

/// The trigger SQL for `relation`, also written to `out` when given.
pub fn cmd_emit_trigger(
    ws: &Workspace,
    relation: &str,
    out: Option<&Path>,
) -> Result<String, WorkspaceError> {
    let sql = emit_trigger_sql(&ws.rules, relation)?;
    if let Some(path) = out {
        write_file(path, &sql)?;
    }
    Ok(sql)
}
