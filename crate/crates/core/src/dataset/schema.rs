use serde::{Deserialize, Serialize};

/// Nominal columns the encoder knows how to expand.
pub const NOMINAL_COLUMNS: [&str; 3] = ["proto", "service", "state"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Nominal,
    LabelBinary,
    LabelCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

/// Ordered list of expected columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<ColumnSpec>,
}

const UNSW_NUMERIC: [&str; 40] = [
    "id",
    "dur",
    "spkts",
    "dpkts",
    "sbytes",
    "dbytes",
    "rate",
    "sttl",
    "dttl",
    "sload",
    "dload",
    "sloss",
    "dloss",
    "sinpkt",
    "dinpkt",
    "sjit",
    "djit",
    "swin",
    "stcpb",
    "dtcpb",
    "dwin",
    "tcprtt",
    "synack",
    "ackdat",
    "smean",
    "dmean",
    "trans_depth",
    "response_body_len",
    "ct_srv_src",
    "ct_state_ttl",
    "ct_dst_ltm",
    "ct_src_dport_ltm",
    "ct_dst_sport_ltm",
    "ct_dst_src_ltm",
    "is_ftp_login",
    "ct_ftp_cmd",
    "ct_flw_http_mthd",
    "ct_src_ltm",
    "ct_srv_dst",
    "is_sm_ips_ports",
];

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Self {
        Self { columns }
    }

    /// Column layout of the published 10% UNSW-NB15 train/test files
    /// (45 columns).
    pub fn unsw_nb15() -> Self {
        let mut columns = Vec::with_capacity(45);
        for name in UNSW_NUMERIC {
            columns.push(ColumnSpec::new(name, ColumnKind::Numeric));
            // nominal columns sit right after `dur` in the published files
            if name == "dur" {
                for nominal in NOMINAL_COLUMNS {
                    columns.push(ColumnSpec::new(nominal, ColumnKind::Nominal));
                }
            }
        }
        columns.push(ColumnSpec::new("attack_cat", ColumnKind::LabelCategory));
        columns.push(ColumnSpec::new("label", ColumnKind::LabelBinary));
        Self { columns }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}
