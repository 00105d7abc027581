//! Report assembly and rendering.
//!
//! Every subcommand fills the same report shape and the two renderers walk
//! it. Floats are printed with 17 significant digits so that parsing the
//! output reproduces each value bit for bit.

use dyadens::testkit::ExperimentReport;
use dyadens::CellReport;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Grid abscissas are usually points of the unit interval, but `sample`
/// uses the draw index there.
pub enum Number {
    Float(f64),
    Int(u64),
}

impl Number {
    fn render(&self) -> String {
        match self {
            Number::Float(x) => fmt_f64(*x),
            Number::Int(i) => i.to_string(),
        }
    }
}

pub struct GridRow {
    pub x: Number,
    pub value: f64,
}

pub struct DimsBlock {
    pub probs: Vec<f64>,
    pub tail_mass: f64,
}

pub struct HeightsBlock {
    pub at_query: Option<f64>,
    pub average: f64,
}

pub struct ConfigBlock {
    pub domain: String,
    pub split_prior: f64,
    pub dim_trunc: usize,
    pub max_depth: u32,
    pub overflow_threshold: f64,
    pub duplicate_policy: &'static str,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Report {
    pub command: &'static str,
    pub config: ConfigBlock,
    pub ln_evidence: Option<f64>,
    pub node_count: Option<u64>,
    pub dims: Option<DimsBlock>,
    pub heights: Option<HeightsBlock>,
    pub grid: Option<Vec<GridRow>>,
    pub map_cells: Option<Vec<CellReport>>,
    pub experiment: Option<ExperimentReport>,
}

impl Report {
    pub fn bare(command: &'static str, config: ConfigBlock) -> Report {
        Report {
            command,
            config,
            ln_evidence: None,
            node_count: None,
            dims: None,
            heights: None,
            grid: None,
            map_cells: None,
            experiment: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_json(&self) -> String {
        let mut entries = vec![
            format!("  \"command\": \"{}\"", self.command),
            format!("  \"config\": {}", self.config.render_json()),
        ];
        if let Some(v) = self.ln_evidence {
            entries.push(format!("  \"ln_evidence\": {}", fmt_f64(v)));
        }
        if let Some(n) = self.node_count {
            entries.push(format!("  \"node_count\": {n}"));
        }
        if let Some(dims) = &self.dims {
            let probs: Vec<String> = dims
                .probs
                .iter()
                .map(|p| format!("      {}", fmt_f64(*p)))
                .collect();
            entries.push(format!(
                "  \"dims\": {{\n    \"probs\": [\n{}\n    ],\n    \"tail_mass\": {}\n  }}",
                probs.join(",\n"),
                fmt_f64(dims.tail_mass)
            ));
        }
        if let Some(heights) = &self.heights {
            let mut inner = Vec::new();
            if let Some(q) = heights.at_query {
                inner.push(format!("    \"at_query\": {}", fmt_f64(q)));
            }
            inner.push(format!("    \"average\": {}", fmt_f64(heights.average)));
            entries.push(format!("  \"heights\": {{\n{}\n  }}", inner.join(",\n")));
        }
        if let Some(rows) = &self.grid {
            entries.push(render_json_list("grid", rows, |row| {
                format!(
                    "{{\"x\": {}, \"value\": {}}}",
                    row.x.render(),
                    fmt_f64(row.value)
                )
            }));
        }
        if let Some(cells) = &self.map_cells {
            entries.push(render_json_list("map_cells", cells, |cell| {
                format!(
                    "{{\"lo\": {}, \"hi\": {}, \"depth\": {}, \"count\": {}}}",
                    fmt_f64(cell.lo),
                    fmt_f64(cell.hi),
                    cell.depth,
                    cell.count
                )
            }));
        }
        if let Some(experiment) = &self.experiment {
            let sizes: Vec<String> = experiment
                .sizes
                .iter()
                .map(|s| {
                    format!(
                        "      {{\"n\": {}, \"ln_evidence\": {}, \"node_count\": {}, \
                         \"mean_abs_log_density_error\": {}, \"expected_dimension\": {}, \
                         \"average_height\": {}}}",
                        s.n,
                        fmt_f64(s.ln_evidence),
                        s.node_count,
                        fmt_f64(s.mean_abs_log_density_error),
                        fmt_f64(s.expected_dimension),
                        fmt_f64(s.average_height)
                    )
                })
                .collect();
            entries.push(format!(
                "  \"experiment\": {{\n    \"distribution\": \"{}\",\n    \"seed\": {},\n    \
                 \"grid\": {},\n    \"sizes\": [\n{}\n    ]\n  }}",
                experiment.distribution,
                experiment.seed,
                experiment.grid,
                sizes.join(",\n")
            ));
        }
        format!("{{\n{}\n}}\n", entries.join(",\n"))
    }

    fn render_csv(&self) -> String {
        if let Some(rows) = &self.grid {
            let mut out = String::from("x,value\n");
            for row in rows {
                out.push_str(&format!("{},{}\n", row.x.render(), fmt_f64(row.value)));
            }
            return out;
        }
        if let Some(cells) = &self.map_cells {
            let mut out = String::from("lo,hi,depth,count\n");
            for cell in cells {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_f64(cell.lo),
                    fmt_f64(cell.hi),
                    cell.depth,
                    cell.count
                ));
            }
            return out;
        }
        if let Some(experiment) = &self.experiment {
            let mut out = String::from(
                "n,ln_evidence,node_count,mean_abs_log_density_error,expected_dimension,average_height\n",
            );
            for s in &experiment.sizes {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    s.n,
                    fmt_f64(s.ln_evidence),
                    s.node_count,
                    fmt_f64(s.mean_abs_log_density_error),
                    fmt_f64(s.expected_dimension),
                    fmt_f64(s.average_height)
                ));
            }
            return out;
        }

        let mut out = String::from("key,value\n");
        if let Some(v) = self.ln_evidence {
            out.push_str(&format!("ln_evidence,{}\n", fmt_f64(v)));
        }
        if let Some(n) = self.node_count {
            out.push_str(&format!("node_count,{n}\n"));
        }
        if let Some(dims) = &self.dims {
            for (k, p) in dims.probs.iter().enumerate() {
                out.push_str(&format!("prob_{k},{}\n", fmt_f64(*p)));
            }
            out.push_str(&format!("tail_mass,{}\n", fmt_f64(dims.tail_mass)));
        }
        if let Some(heights) = &self.heights {
            if let Some(q) = heights.at_query {
                out.push_str(&format!("height_at_query,{}\n", fmt_f64(q)));
            }
            out.push_str(&format!("average_height,{}\n", fmt_f64(heights.average)));
        }
        out
    }
}

impl ConfigBlock {
    fn render_json(&self) -> String {
        format!(
            "{{\n    \"domain\": \"{}\",\n    \"split_prior\": {},\n    \"dim_trunc\": {},\n    \
             \"max_depth\": {},\n    \"overflow_threshold\": {},\n    \
             \"duplicate_policy\": \"{}\"\n  }}",
            self.domain,
            fmt_f64(self.split_prior),
            self.dim_trunc,
            self.max_depth,
            fmt_f64(self.overflow_threshold),
            self.duplicate_policy
        )
    }
}

fn render_json_list<T>(key: &str, items: &[T], mut row: impl FnMut(&T) -> String) -> String {
    if items.is_empty() {
        return format!("  \"{key}\": []");
    }
    let rows: Vec<String> = items.iter().map(|item| format!("    {}", row(item))).collect();
    format!("  \"{key}\": [\n{}\n  ]", rows.join(",\n"))
}
