use std::path::Path;
use std::time::Instant;

use bandod::bandwidth::{estimate_bandwidth, rank_candidates, BandwidthEstimate};
use bandod::bench::{
    gap_baseline, generate_dataset, pairwise_prf, perturb_cer, GeneratedRow, GroundTruth, SeriesDatasetConfig,
};
use bandod::discovery::{
    abod_error_ratio, bcod_segment, discover_abcod_with, evaluate_range, DpOptions, DpStrategy, Segment, Segmentation,
};
use bandod::lmb::compute_lmb_oriented;
use bandod::model::{BandOdSpec, Orientation};
use bandod::oracle::{brute_lmb, brute_min_bcod_segments, brute_segmentation};
use bandod::pieces::discover_abcod_pieces_with;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::io::{write_file, CliError, CliResult, ColumnSpec, Encoded, Prepared, Table};
use crate::report::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaChoice {
    Fixed(i64),
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Abod,
    Bcod,
    Abcod,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Abod => "abod",
            Mode::Bcod => "bcod",
            Mode::Abcod => "abcod",
        }
    }
}

/// Everything a discovery run needs besides the data.
#[derive(Debug, Clone)]
pub struct DiscoverOptions {
    pub mode: Mode,
    pub orientation: Orientation,
    pub delta: DeltaChoice,
    pub epsilon: usize,
    pub pieces: bool,
    pub strategy: DpStrategy,
    pub ratio: f64,
    pub delta_max: i64,
}

pub struct Input<'a> {
    pub path: &'a Path,
    pub x: &'a [ColumnSpec],
    pub y: &'a [ColumnSpec],
    pub id: Option<&'a str>,
    pub group_by: Option<&'a str>,
}

fn names(specs: &[ColumnSpec]) -> Vec<String> {
    specs.iter().map(|s| s.name.clone()).collect()
}

/// Reads the file and cuts it into sorted sequences, one per group.
fn load(input: &Input) -> CliResult<Vec<(Option<String>, Prepared)>> {
    let table = Table::read(input.path)?;
    let encoded = Encoded::new(&table, input.x, input.y, input.id)?;
    Ok(table
        .groups(input.group_by)?
        .into_iter()
        .map(|(key, rows)| (key, encoded.sequence(&rows)))
        .collect())
}

fn segment_report(p: &Prepared, s: &Segment) -> SegmentReport {
    SegmentReport {
        start_row: p.row_of(s.start),
        end_row: p.row_of(s.end),
        size: s.len(),
        direction: s.direction.as_str().into(),
        gain: s.gain,
        cost: s.cost,
        outlier_rows: s.outliers.iter().map(|&o| p.row_of(o)).collect(),
        start_id: p.id_of(s.start),
        end_id: p.id_of(s.end),
        outlier_ids: p
            .ids
            .as_ref()
            .map(|_| s.outliers.iter().filter_map(|&o| p.id_of(o)).collect()),
    }
}

fn segment_of_whole(ys: &[Option<i64>], delta: i64, orientation: Orientation) -> Segmentation {
    if ys.is_empty() {
        return Segmentation::default();
    }
    let dir = abod_error_ratio(ys, delta, orientation).direction;
    let e = evaluate_range(ys, 1, ys.len(), delta, dir);
    let seg = Segment {
        start: 1,
        end: ys.len(),
        direction: e.direction,
        gain: e.gain,
        cost: e.cost,
        outliers: e.outliers,
        members: e.members,
    };
    Segmentation {
        total_gain: seg.weighted_gain(),
        segments: vec![seg],
    }
}

fn resolve_delta(ys: &[Option<i64>], opts: &DiscoverOptions) -> CliResult<(i64, Option<BandwidthEstimate>)> {
    match opts.delta {
        DeltaChoice::Fixed(d) => Ok((d, None)),
        DeltaChoice::Auto => {
            let est = estimate_bandwidth(ys, opts.delta_max, opts.ratio, opts.orientation)?;
            Ok((est.delta, Some(est)))
        }
    }
}

pub fn segment_sequence(ys: &[Option<i64>], delta: i64, opts: &DiscoverOptions) -> CliResult<Segmentation> {
    let spec = BandOdSpec::new(opts.orientation, delta, opts.epsilon)?;
    Ok(match opts.mode {
        Mode::Abod => segment_of_whole(ys, delta, opts.orientation),
        Mode::Bcod => bcod_segment(ys, delta, opts.orientation),
        Mode::Abcod => {
            let dp = DpOptions {
                strategy: opts.strategy,
                deadline: None,
            };
            if opts.pieces {
                discover_abcod_pieces_with(ys, &spec, dp)?.0
            } else {
                discover_abcod_with(ys, &spec, dp)?.0
            }
        }
    })
}

fn discover_group(key: Option<String>, p: &Prepared, opts: &DiscoverOptions) -> CliResult<GroupReport> {
    let (delta, est) = resolve_delta(&p.ys, opts)?;
    let seg = segment_sequence(&p.ys, delta, opts)?;
    let outliers = seg.outliers().len();
    let non_null = p.ys.iter().flatten().count();
    let error_ratio = if p.ys.is_empty() {
        "0".to_string()
    } else {
        usize_ratio_string(&Ratio::new(outliers, p.ys.len()))
    };
    Ok(GroupReport {
        group: key,
        rows: p.ys.len(),
        delta,
        delta_mean: est.map(|e| ratio_string(&e.mean)),
        segments: seg.segments.iter().map(|s| segment_report(p, s)).collect(),
        totals: Totals {
            gain: seg.total_gain,
            segments: seg.segments.len(),
            outliers,
            non_null,
            error_ratio,
        },
    })
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn discover(input: &Input, opts: &DiscoverOptions, timings: bool) -> CliResult<DiscoveryReport> {
    let t0 = Instant::now();
    let groups = load(input)?;
    let read_ms = ms(t0);
    let t1 = Instant::now();
    let reports: Vec<GroupReport> = groups
        .into_par_iter()
        .map(|(key, p)| discover_group(key, &p, opts))
        .collect::<CliResult<_>>()?;
    let discover_ms = ms(t1);
    Ok(DiscoveryReport {
        spec: SpecEcho {
            x: names(input.x),
            y: names(input.y),
            mode: opts.mode.as_str().into(),
            direction: opts.orientation.as_str().into(),
            delta: match opts.delta {
                DeltaChoice::Fixed(d) => Some(d),
                DeltaChoice::Auto => None,
            },
            epsilon: opts.epsilon,
            pieces: opts.pieces && opts.mode == Mode::Abcod,
        },
        groups: reports,
        timings: timings.then_some(Timings { read_ms, discover_ms }),
    })
}

pub fn lmb(input: &Input, delta: i64, orientation: Orientation) -> CliResult<LmbReport> {
    if delta < 0 {
        return Err(CliError::Usage("band-width must be non-negative".into()));
    }
    let groups = load(input)?
        .into_par_iter()
        .map(|(key, p)| {
            let band = compute_lmb_oriented(&p.ys, delta, orientation);
            let ids = |v: &[usize]| p.ids.as_ref().map(|_| v.iter().filter_map(|&i| p.id_of(i)).collect());
            LmbGroup {
                group: key,
                length: band.length,
                direction: band.direction.as_str().into(),
                member_rows: band.members.iter().map(|&i| p.row_of(i)).collect(),
                outlier_rows: band.outliers.iter().map(|&i| p.row_of(i)).collect(),
                member_ids: ids(&band.members),
                outlier_ids: ids(&band.outliers),
            }
        })
        .collect();
    Ok(LmbReport {
        x: names(input.x),
        y: names(input.y),
        delta,
        groups,
    })
}

fn estimate_group(
    key: Option<String>,
    p: &Prepared,
    delta_max: i64,
    ratio: f64,
    o: Orientation,
) -> CliResult<EstimateGroup> {
    let est = estimate_bandwidth(&p.ys, delta_max, ratio, o)?;
    let segments = est
        .segments
        .iter()
        .map(|(c, sw)| CandidateReport {
            start_row: p.row_of(c.start),
            end_row: p.row_of(c.end),
            size: c.end + 1 - c.start,
            error: usize_ratio_string(&c.error),
            chosen: sw.chosen,
            sweep: sw
                .per_delta
                .iter()
                .map(|r| SweepEntry {
                    delta: r.delta,
                    distance: r.distance.as_ref().map(ratio_string),
                    degree: ratio_string(&r.degree),
                })
                .collect(),
        })
        .collect();
    Ok(EstimateGroup {
        group: key,
        delta: est.delta,
        mean: ratio_string(&est.mean),
        segments,
    })
}

pub fn estimate_delta(input: &Input, delta_max: i64, ratio: f64, o: Orientation) -> CliResult<EstimateReport> {
    let groups = load(input)?
        .into_par_iter()
        .map(|(key, p)| estimate_group(key, &p, delta_max, ratio, o))
        .collect::<CliResult<_>>()?;
    Ok(EstimateReport {
        x: names(input.x),
        y: names(input.y),
        direction: o.as_str().into(),
        ratio,
        delta_max,
        groups,
    })
}

/// Candidates are `X=>Y` pairs of column lists, e.g. `country,cat=>year`.
pub fn rank(path: &Path, candidates: &[String], delta_max: i64, ratio: f64, o: Orientation) -> CliResult<RankReport> {
    let table = Table::read(path)?;
    let mut seqs = Vec::with_capacity(candidates.len());
    for c in candidates {
        let (x, y) = c
            .split_once("=>")
            .ok_or_else(|| CliError::Usage(format!("candidate `{c}` is not of the form X=>Y")))?;
        let enc = Encoded::new(&table, &ColumnSpec::parse_list(x)?, &ColumnSpec::parse_list(y)?, None)?;
        let p = enc.sequence(&(0..table.rows.len()).collect::<Vec<_>>());
        seqs.push((c.clone(), p.ys));
    }
    let ranked = rank_candidates(&seqs, delta_max, ratio, o)?;
    Ok(RankReport {
        ranking: ranked
            .into_iter()
            .map(|r| RankEntry {
                candidate: r.name,
                delta: r.delta,
                score: ratio_string(&r.score),
            })
            .collect(),
    })
}

fn write_dataset(rows: &[GeneratedRow], truth: &GroundTruth, output: &Path, truth_path: &Path) -> CliResult<()> {
    let mut data = String::from("row_id,x,y\n");
    let mut gt = String::from("row_id,series_id,is_error\n");
    for (i, r) in rows.iter().enumerate() {
        let y = r.y.map(|v| v.to_string()).unwrap_or_default();
        data.push_str(&format!("{},{},{}\n", r.row_id, r.x, y));
        gt.push_str(&format!(
            "{},{},{}\n",
            r.row_id,
            truth.series[i],
            u8::from(truth.is_error[i])
        ));
    }
    write_file(output, &data)?;
    write_file(truth_path, &gt)
}

fn dataset_report(
    rows: &[GeneratedRow],
    truth: &GroundTruth,
    seed: u64,
    output: &Path,
    truth_path: &Path,
) -> DatasetReport {
    DatasetReport {
        rows: rows.len(),
        series: truth.series.iter().max().map_or(0, |m| m + 1),
        errors: truth.is_error.iter().filter(|&&e| e).count(),
        seed,
        output: output.display().to_string(),
        truth: truth_path.display().to_string(),
    }
}

pub fn generate(cfg: &SeriesDatasetConfig, output: &Path, truth_path: &Path) -> CliResult<DatasetReport> {
    let (rows, truth) = generate_dataset(cfg)?;
    write_dataset(&rows, &truth, output, truth_path)?;
    Ok(dataset_report(&rows, &truth, cfg.seed, output, truth_path))
}

fn parse_field<T: std::str::FromStr>(raw: &str, row: usize, column: &str) -> CliResult<T> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Data(format!("row {row}, column `{column}`: cannot parse `{raw}`")))
}

fn read_truth(path: &Path) -> CliResult<(Vec<usize>, GroundTruth)> {
    let t = Table::read(path)?;
    let (rc, sc, ec) = (t.column("row_id")?, t.column("series_id")?, t.column("is_error")?);
    let mut ids = Vec::with_capacity(t.rows.len());
    let mut truth = GroundTruth::default();
    for (i, row) in t.rows.iter().enumerate() {
        ids.push(parse_field(&row[rc], i + 1, "row_id")?);
        truth.series.push(parse_field(&row[sc], i + 1, "series_id")?);
        truth
            .is_error
            .push(parse_field::<u8>(&row[ec], i + 1, "is_error")? != 0);
    }
    Ok((ids, truth))
}

fn read_generated(path: &Path) -> CliResult<Vec<GeneratedRow>> {
    let t = Table::read(path)?;
    let (rc, xc, yc) = (t.column("row_id")?, t.column("x")?, t.column("y")?);
    t.rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let y = if bandod::model::is_null_token(&row[yc]) {
                None
            } else {
                Some(parse_field(&row[yc], i + 1, "y")?)
            };
            Ok(GeneratedRow {
                row_id: parse_field(&row[rc], i + 1, "row_id")?,
                x: parse_field(&row[xc], i + 1, "x")?,
                y,
            })
        })
        .collect()
}

pub fn perturb(
    input: &Path,
    truth: &Path,
    rate: f64,
    seed: u64,
    output: &Path,
    truth_out: &Path,
) -> CliResult<DatasetReport> {
    let rows = read_generated(input)?;
    let (ids, gt) = read_truth(truth)?;
    if ids != rows.iter().map(|r| r.row_id).collect::<Vec<_>>() {
        return Err(CliError::Data("ground truth rows do not match the data rows".into()));
    }
    let (rows, gt) = perturb_cer(&rows, &gt, rate, seed)?;
    write_dataset(&rows, &gt, output, truth_out)?;
    Ok(dataset_report(&rows, &gt, seed, output, truth_out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Abcod,
    Gap,
}

/// Scores a segmentation of the whole file against a ground-truth file whose
/// `row_id` column lists the data rows in file order.
pub fn evaluate(
    input: &Input,
    truth: &Path,
    method: Method,
    opts: &DiscoverOptions,
    k_sigma: f64,
) -> CliResult<EvaluationReport> {
    let table = Table::read(input.path)?;
    let (_, gt) = read_truth(truth)?;
    if gt.series.len() != table.rows.len() {
        return Err(CliError::Data(format!(
            "ground truth has {} rows, data has {}",
            gt.series.len(),
            table.rows.len()
        )));
    }
    let enc = Encoded::new(&table, input.x, input.y, None)?;
    let p = enc.sequence(&(0..table.rows.len()).collect::<Vec<_>>());
    let seg = match method {
        Method::Abcod => {
            let (delta, _) = resolve_delta(&p.ys, opts)?;
            segment_sequence(&p.ys, delta, opts)?
        }
        Method::Gap => gap_baseline(&p.xs, &p.ys, k_sigma),
    };
    let mut predicted = vec![0; p.rows.len()];
    let mut truth_labels = vec![0; p.rows.len()];
    for (k, s) in seg.segments.iter().enumerate() {
        for pos in s.start..=s.end {
            predicted[pos - 1] = k;
            truth_labels[pos - 1] = gt.series[p.row_of(pos) - 1];
        }
    }
    let prf = pairwise_prf(&predicted, &truth_labels);
    let mut series = gt.series.clone();
    series.sort_unstable();
    series.dedup();
    Ok(EvaluationReport {
        method: match method {
            Method::Abcod => "abcod".into(),
            Method::Gap => "gap".into(),
        },
        rows: p.rows.len(),
        predicted_segments: seg.segments.len(),
        true_series: series.len(),
        precision: prf.precision,
        recall: prf.recall,
        f1: prf.f1,
    })
}

pub fn gap(input: &Input, k_sigma: f64) -> CliResult<DiscoveryReport> {
    let groups = load(input)?;
    let reports = groups
        .into_par_iter()
        .map(|(key, p)| {
            let seg = gap_baseline(&p.xs, &p.ys, k_sigma);
            let outliers = seg.outliers().len();
            GroupReport {
                group: key,
                rows: p.ys.len(),
                delta: 0,
                delta_mean: None,
                segments: seg.segments.iter().map(|s| segment_report(&p, s)).collect(),
                totals: Totals {
                    gain: seg.total_gain,
                    segments: seg.segments.len(),
                    outliers,
                    non_null: p.ys.iter().flatten().count(),
                    error_ratio: "0".into(),
                },
            }
        })
        .collect();
    Ok(DiscoveryReport {
        spec: SpecEcho {
            x: names(input.x),
            y: names(input.y),
            mode: "gap".into(),
            direction: "asc".into(),
            delta: None,
            epsilon: 0,
            pieces: false,
        },
        groups: reports,
        timings: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Lmb,
    Abcod,
    Bcod,
}

/// Brute-force answers on small inputs (at most 12 rows).
pub fn oracle(input: &Input, check: Check, delta: i64, epsilon: usize, o: Orientation) -> CliResult<OracleReport> {
    if delta < 0 {
        return Err(CliError::Usage("band-width must be non-negative".into()));
    }
    let table = Table::read(input.path)?;
    let enc = Encoded::new(&table, input.x, input.y, None)?;
    let p = enc.sequence(&(0..table.rows.len()).collect::<Vec<_>>());
    let (name, value, witness, eps) = match check {
        Check::Lmb => {
            let (len, w, _) = brute_lmb(&p.ys, delta, o)?;
            ("lmb", len as i64, Some(w.iter().map(|&i| p.row_of(i)).collect()), None)
        }
        Check::Abcod => (
            "abcod",
            brute_segmentation(&p.ys, delta, epsilon, o)?,
            None,
            Some(epsilon),
        ),
        Check::Bcod => ("bcod", brute_min_bcod_segments(&p.ys, delta, o)? as i64, None, None),
    };
    Ok(OracleReport {
        check: name.into(),
        rows: p.ys.len(),
        direction: o.as_str().into(),
        delta,
        epsilon: eps,
        value,
        witness_rows: witness,
    })
}
