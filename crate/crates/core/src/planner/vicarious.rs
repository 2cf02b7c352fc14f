use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use super::{FilterCriteria, OpportunityKind, XcalOpportunity};
use crate::access::{AccessEvent, Target};

/// Gap that separates two passes of the same satellite over a site.
pub const DEFAULT_PASS_GAP_S: f64 = 600.0;

/// Slack on the sliding-window bounds; the exact predicate decides inclusion.
const WINDOW_SLACK_S: f64 = 1e-6;

/// Time span of one satellite pass over a site, in seconds since the scenario start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassSpan {
    pub start_s: f64,
    pub end_s: f64,
}

/// Grid-level matches of one (site, reference pass, test pass) collapsed into
/// a single region opportunity.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionOpportunity {
    pub site_id: Arc<str>,
    pub ref_sat: Arc<str>,
    pub test_sat: Arc<str>,
    pub ref_pass: PassSpan,
    pub test_pass: PassSpan,
    /// Best match per grid point, ordered by grid index.
    pub image_options: Vec<XcalOpportunity>,
    /// Number of grid-level matches folded into this opportunity.
    pub match_count: usize,
    /// Signed dt of the member with the smallest |dt|.
    pub dt_hours: f64,
    /// Pareto front of (|dt| hours, completion offset s) over all members,
    /// sorted by increasing |dt|. Completion is the later of the two collections.
    pub(crate) frontier: Vec<(f64, f64)>,
}

impl RegionOpportunity {
    /// Earliest time at which some member pair has been fully collected.
    pub fn completion_offset_s(&self) -> f64 {
        self.frontier.last().map(|f| f.1).unwrap_or(f64::INFINITY)
    }

    /// True when some member has |dt| within `dt_max_hours` and completes by
    /// `horizon_hours`.
    pub fn has_member_within(&self, dt_max_hours: f64, horizon_hours: f64) -> bool {
        self.frontier
            .iter()
            .take_while(|f| f.0 <= dt_max_hours)
            .any(|f| f.1 <= horizon_hours * 3600.0)
    }

    fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dt_hours
            .total_cmp(&other.dt_hours)
            .then_with(|| self.ref_pass.start_s.total_cmp(&other.ref_pass.start_s))
            .then_with(|| self.site_id.cmp(&other.site_id))
            .then_with(|| self.ref_sat.cmp(&other.ref_sat))
            .then_with(|| self.test_sat.cmp(&other.test_sat))
            .then_with(|| self.test_pass.start_s.total_cmp(&other.test_pass.start_s))
    }
}

fn pair_ok(r: &AccessEvent, t: &AccessEvent, c: &FilterCriteria) -> bool {
    (t.offset_s - r.offset_s).abs() <= c.dt_site_max_s()
        && (r.sza_deg - t.sza_deg).abs() <= c.dsza_max_deg
        && (r.vza_deg - t.vza_deg).abs() <= c.dvza_max_deg
}

type Group<'a> = (Vec<&'a AccessEvent>, Vec<&'a AccessEvent>);

/// Buckets admissible events by target, each side sorted by time.
fn group_by_target<'a>(
    refs: &'a [AccessEvent],
    tests: &'a [AccessEvent],
    c: &FilterCriteria,
) -> BTreeMap<&'a Target, Group<'a>> {
    let mut groups: BTreeMap<&Target, Group> = BTreeMap::new();
    for e in refs.iter().filter(|e| c.admits_event(e)) {
        groups.entry(&e.target).or_default().0.push(e);
    }
    for e in tests.iter().filter(|e| c.admits_event(e)) {
        groups.entry(&e.target).or_default().1.push(e);
    }
    groups.retain(|_, (r, t)| !r.is_empty() && !t.is_empty());
    for (r, t) in groups.values_mut() {
        r.sort_by(|a, b| a.canonical_cmp(b));
        t.sort_by(|a, b| a.canonical_cmp(b));
    }
    groups
}

/// Sliding window over two time-sorted lists at one target; emits index pairs.
fn match_group(
    refs: &[&AccessEvent],
    tests: &[&AccessEvent],
    c: &FilterCriteria,
    mut emit: impl FnMut(usize, usize),
) {
    let dt = c.dt_site_max_s() + WINDOW_SLACK_S;
    let mut lo = 0;
    for (i, r) in refs.iter().enumerate() {
        while lo < tests.len() && tests[lo].offset_s < r.offset_s - dt {
            lo += 1;
        }
        for (j, t) in tests.iter().enumerate().skip(lo) {
            if t.offset_s > r.offset_s + dt {
                break;
            }
            if pair_ok(r, t, c) {
                emit(i, j);
            }
        }
    }
}

/// Every (reference, test) event pair at a shared target that passes all filters.
pub fn pair_vicarious(
    ref_events: &[AccessEvent],
    test_events: &[AccessEvent],
    criteria: &FilterCriteria,
) -> Vec<XcalOpportunity> {
    let groups: Vec<Group> = group_by_target(ref_events, test_events, criteria)
        .into_values()
        .collect();
    let mut out: Vec<XcalOpportunity> = groups
        .par_iter()
        .flat_map_iter(|(r, t)| {
            let mut pairs = Vec::new();
            match_group(r, t, criteria, |i, j| {
                pairs.push(XcalOpportunity::new(
                    OpportunityKind::Vicarious,
                    r[i].clone(),
                    t[j].clone(),
                ))
            });
            pairs
        })
        .collect();
    out.par_sort_by(XcalOpportunity::canonical_cmp);
    out
}

/// Splits times into passes wherever consecutive times differ by more than `gap`.
fn cluster_passes(mut times: Vec<f64>, gap: f64) -> Vec<PassSpan> {
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut spans: Vec<PassSpan> = Vec::new();
    for t in times {
        match spans.last_mut() {
            Some(s) if t - s.end_s <= gap => s.end_s = t,
            _ => spans.push(PassSpan {
                start_s: t,
                end_s: t,
            }),
        }
    }
    spans
}

fn pass_of(spans: &[PassSpan], t: f64) -> usize {
    spans.partition_point(|s| s.start_s <= t) - 1
}

/// Ranking for the representative image option at a grid point.
fn option_rank(r: &AccessEvent, t: &AccessEvent) -> [f64; 5] {
    [
        (r.vza_deg - t.vza_deg).abs(),
        (t.offset_s - r.offset_s).abs(),
        (r.sza_deg - t.sza_deg).abs(),
        r.offset_s,
        t.offset_s,
    ]
}

fn rank_lt(a: &[f64; 5], b: &[f64; 5]) -> bool {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .is_some_and(|o| o.is_lt())
}

/// Keeps the points not weakly dominated in (|dt|, completion), sorted by |dt|.
fn insert_pareto(front: &mut Vec<(f64, f64)>, p: (f64, f64)) {
    let k = front.partition_point(|q| q.0 <= p.0);
    if k > 0 && front[k - 1].1 <= p.1 {
        return;
    }
    let mut end = k;
    while end < front.len() && front[end].1 >= p.1 {
        end += 1;
    }
    front.splice(k..end, std::iter::once(p));
}

/// Where an event sits: satellite index, pass index, and the pass span.
#[derive(Clone, Copy)]
struct PassLoc {
    sat: u32,
    pass: u32,
    span: PassSpan,
}

/// Passes of every satellite over one site.
struct SitePasses<'a> {
    by_sat: BTreeMap<&'a str, (u32, Vec<PassSpan>)>,
}

impl<'a> SitePasses<'a> {
    fn from_times(times: BTreeMap<&'a str, Vec<f64>>, gap: f64) -> Self {
        SitePasses {
            by_sat: times
                .into_iter()
                .enumerate()
                .map(|(i, (sat, t))| (sat, (i as u32, cluster_passes(t, gap))))
                .collect(),
        }
    }

    fn locate(&self, ev: &AccessEvent) -> PassLoc {
        let (sat, spans) = &self.by_sat[&*ev.sat_id];
        let k = pass_of(spans, ev.offset_s);
        PassLoc {
            sat: *sat,
            pass: k as u32,
            span: spans[k],
        }
    }
}

/// Running aggregate of one region opportunity.
struct RegionAcc<'a> {
    ref_sat: &'a Arc<str>,
    test_sat: &'a Arc<str>,
    ref_pass: PassSpan,
    test_pass: PassSpan,
    /// Best option per target, tagged with the target's group number.
    best: Vec<(usize, &'a AccessEvent, &'a AccessEvent, [f64; 5])>,
    match_count: usize,
    /// Lexicographically smallest (|dt|, completion, dt) over members.
    closest: (f64, f64, f64),
    frontier: Vec<(f64, f64)>,
}

impl<'a> RegionAcc<'a> {
    fn add(&mut self, group: usize, r: &'a AccessEvent, t: &'a AccessEvent) {
        self.match_count += 1;
        let dt = (t.offset_s - r.offset_s) / 3600.0;
        let done = r.offset_s.max(t.offset_s);
        let key = (dt.abs(), done, dt);
        let c = &self.closest;
        if key
            .0
            .total_cmp(&c.0)
            .then(key.1.total_cmp(&c.1))
            .then(key.2.total_cmp(&c.2))
            .is_lt()
        {
            self.closest = key;
        }
        insert_pareto(&mut self.frontier, (dt.abs(), done));

        let rank = option_rank(r, t);
        match self.best.last_mut() {
            Some(cur) if cur.0 == group => {
                if rank_lt(&rank, &cur.3) {
                    *cur = (group, r, t, rank);
                }
            }
            _ => self.best.push((group, r, t, rank)),
        }
    }

    fn finish(self, site_id: Arc<str>) -> RegionOpportunity {
        RegionOpportunity {
            site_id,
            ref_sat: self.ref_sat.clone(),
            test_sat: self.test_sat.clone(),
            ref_pass: self.ref_pass,
            test_pass: self.test_pass,
            image_options: self
                .best
                .into_iter()
                .map(|(_, r, t, _)| {
                    XcalOpportunity::new(OpportunityKind::Vicarious, r.clone(), t.clone())
                })
                .collect(),
            match_count: self.match_count,
            dt_hours: self.closest.2,
            frontier: self.frontier,
        }
    }
}

/// Region aggregates for the matches of one site. Matches must arrive
/// grouped by target, with `group` increasing from one target to the next.
struct SiteRegions<'a> {
    index: HashMap<(u32, u32, u32, u32), usize>,
    regions: Vec<RegionAcc<'a>>,
    last: Option<((u32, u32, u32, u32), usize)>,
    site_id: Arc<str>,
}

impl<'a> SiteRegions<'a> {
    fn new(site_id: Arc<str>) -> Self {
        SiteRegions {
            index: HashMap::new(),
            regions: Vec::new(),
            last: None,
            site_id,
        }
    }

    fn add(
        &mut self,
        group: usize,
        r: &'a AccessEvent,
        t: &'a AccessEvent,
        rl: PassLoc,
        tl: PassLoc,
    ) {
        let key = (rl.sat, tl.sat, rl.pass, tl.pass);
        let k = match self.last {
            Some((lk, k)) if lk == key => k,
            _ => {
                let n = self.regions.len();
                let k = *self.index.entry(key).or_insert(n);
                if k == n {
                    self.regions.push(RegionAcc {
                        ref_sat: &r.sat_id,
                        test_sat: &t.sat_id,
                        ref_pass: rl.span,
                        test_pass: tl.span,
                        best: Vec::new(),
                        match_count: 0,
                        closest: (f64::INFINITY, f64::INFINITY, f64::INFINITY),
                        frontier: Vec::new(),
                    });
                }
                self.last = Some((key, k));
                k
            }
        };
        self.regions[k].add(group, r, t);
    }

    fn finish(self) -> Vec<RegionOpportunity> {
        let site = self.site_id;
        self.regions
            .into_iter()
            .map(|acc| acc.finish(site.clone()))
            .collect()
    }
}

fn site_of(target: &Target) -> Arc<str> {
    match target {
        Target::Grid { site_id, .. } => site_id.clone(),
        Target::Toa { .. } => Arc::from(""),
    }
}

/// Pairs and collapses to region opportunities site by site, streaming
/// grid-level matches straight into their regions.
///
/// A pass is a run of one satellite's access events over the site with no
/// gap longer than `pass_gap_s`; passes come from all supplied events, so a
/// region keeps its identity when the filters change.
pub fn plan_vicarious(
    ref_events: &[AccessEvent],
    test_events: &[AccessEvent],
    criteria: &FilterCriteria,
    pass_gap_s: f64,
) -> Vec<RegionOpportunity> {
    let mut times: BTreeMap<Option<&str>, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    for e in ref_events.iter().chain(test_events) {
        times
            .entry(e.target.site_id())
            .or_default()
            .entry(&*e.sat_id)
            .or_default()
            .push(e.offset_s);
    }

    let groups = group_by_target(ref_events, test_events, criteria);
    let mut by_site: BTreeMap<Option<&str>, Vec<(&Target, &Group)>> = BTreeMap::new();
    for (target, g) in &groups {
        by_site
            .entry(target.site_id())
            .or_default()
            .push((*target, g));
    }
    let sites: Vec<(SitePasses, Vec<(&Target, &Group)>)> = by_site
        .into_iter()
        .map(|(site, gs)| {
            (
                SitePasses::from_times(times.remove(&site).unwrap_or_default(), pass_gap_s),
                gs,
            )
        })
        .collect();

    let mut out: Vec<RegionOpportunity> = sites
        .par_iter()
        .flat_map_iter(|(passes, gs)| {
            let mut acc = SiteRegions::new(site_of(gs[0].0));
            for (g, (_, (r, t))) in gs.iter().enumerate() {
                let rl: Vec<PassLoc> = r.iter().map(|e| passes.locate(e)).collect();
                let tl: Vec<PassLoc> = t.iter().map(|e| passes.locate(e)).collect();
                match_group(r, t, criteria, |i, j| acc.add(g, r[i], t[j], rl[i], tl[j]));
            }
            acc.finish()
        })
        .collect();
    out.sort_by(RegionOpportunity::canonical_cmp);
    out
}

/// Groups grid-level opportunities by (site, reference sat, test sat,
/// reference pass, test pass). Passes are maximal runs of the members'
/// collection times with no gap longer than `pass_gap_s`.
pub fn dedupe_to_passes(
    opportunities: &[XcalOpportunity],
    pass_gap_s: f64,
) -> Vec<RegionOpportunity> {
    type PairKey<'a> = (Option<&'a str>, &'a str, &'a str);
    let mut members: BTreeMap<PairKey, Vec<&XcalOpportunity>> = BTreeMap::new();
    for o in opportunities {
        members
            .entry((
                o.ref_event.target.site_id(),
                &o.ref_event.sat_id,
                &o.test_event.sat_id,
            ))
            .or_default()
            .push(o);
    }

    let mut out = Vec::new();
    for ms in members.values_mut() {
        ms.sort_by(|a, b| a.ref_event.target.cmp(&b.ref_event.target));
        let ref_spans = cluster_passes(
            ms.iter().map(|o| o.ref_event.offset_s).collect(),
            pass_gap_s,
        );
        let test_spans = cluster_passes(
            ms.iter().map(|o| o.test_event.offset_s).collect(),
            pass_gap_s,
        );
        let loc = |spans: &[PassSpan], sat: u32, t: f64| {
            let k = pass_of(spans, t);
            PassLoc {
                sat,
                pass: k as u32,
                span: spans[k],
            }
        };
        let mut acc = SiteRegions::new(site_of(&ms[0].ref_event.target));
        let mut group = 0;
        for (i, o) in ms.iter().enumerate() {
            let (r, t) = (&o.ref_event, &o.test_event);
            if i > 0 && ms[i - 1].ref_event.target != r.target {
                group += 1;
            }
            acc.add(
                group,
                r,
                t,
                loc(&ref_spans, 0, r.offset_s),
                loc(&test_spans, 1, t.offset_s),
            );
        }
        out.extend(acc.finish());
    }
    out.sort_by(RegionOpportunity::canonical_cmp);
    out
}
