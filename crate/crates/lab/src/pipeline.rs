//! Mesh → assemble → solve → certify → extract.

use std::thread;
use std::time::Instant;

use signorini_core::assembly::{assemble_system, check_compatibility, DiscreteSystem, ProblemData};
use signorini_core::barriers::{
    comparison_check, intrinsic_barrier, ode_barrier, ode_barrier_extrapolated, quadratic_barrier, ring_barrier,
    select_constants, verify_ode, verify_supersolution, BarrierCertificate, BarrierKind, BarrierRegion,
    ComparisonReport, RegionSamples, SelectionInput, VerificationReport,
};
use signorini_core::coincidence::{
    alpha_stability, coverage, default_tolerance, extract_coincidence, flux_balance_integral, CoincidenceReport,
};
use signorini_core::fields::{check_balance, extend_obstacle, BalanceRegion, ObstacleExtension};
use signorini_core::geometry::{
    build_mesh, intrinsic_distance, theta0, tubular_frame, DomainDescriptor, DomainKind, IntrinsicRegion, TriMesh,
    TubularFrame,
};
use signorini_core::solver::{solve_alpha, solve_problem_one, Method, Solution, SolverOptions};
use signorini_core::{Error, Point};

use crate::config::{BarrierConfig, BasePoint, ScenarioConfig, TargetConfig};
use crate::exact::{self, AnnulusRadial};
use crate::report::*;
use crate::LabError;

/// Comparison tolerance `ũ_h ≤ ū + tol`.
pub const COMPARISON_TOL: f64 = 1e-8;

/// Command-line overrides applied on top of a config.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub resolution: Option<usize>,
    pub alpha_schedule: Option<Vec<f64>>,
    pub kkt_tol: Option<f64>,
    pub method: Option<Method>,
}

impl Overrides {
    pub fn apply(&self, cfg: &ScenarioConfig) -> ScenarioConfig {
        let mut c = cfg.clone();
        if let Some(r) = self.resolution {
            c.resolutions = vec![r];
        }
        if let Some(s) = &self.alpha_schedule {
            c.solver.alpha_schedule = Some(s.clone());
        }
        if let Some(t) = self.kkt_tol {
            c.solver.kkt_tol = Some(t);
        }
        if let Some(m) = self.method {
            c.solver.method = Some(m);
        }
        c
    }
}

/// Everything computed at one resolution.
pub struct Stage {
    pub resolution: usize,
    pub mesh: TriMesh,
    pub system: DiscreteSystem,
    pub data: ProblemData,
    pub solutions: Vec<Solution>,
    pub increments: Option<(Vec<f64>, bool)>,
    pub opts: SolverOptions,
    pub mesh_ms: f64,
    pub assemble_ms: f64,
    pub solve_ms: f64,
}

impl Stage {
    pub fn solution(&self) -> &Solution {
        self.solutions.last().expect("a stage holds at least one solution")
    }
}

/// Report plus the discrete objects it was computed from.
pub struct Artifacts {
    pub report: RunReport,
    pub stage: Stage,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn problem_data(cfg: &ScenarioConfig) -> Result<ProblemData, LabError> {
    Ok(ProblemData { f: cfg.fields.f.build()?, g: cfg.fields.g.build()?, psi: cfg.fields.psi.build()? })
}

/// Compatibility `∫f + <g,1>` with `g` on the Signorini segments.
pub fn compatibility(cfg: &ScenarioConfig, mesh: &TriMesh, data: &ProblemData) -> Result<CompatibilityReport, LabError> {
    let tags = cfg
        .boundary
        .iter()
        .filter(|(_, c)| matches!(c, crate::config::ConditionSpec::Signorini))
        .map(|(t, _)| mesh.tag_index(t))
        .collect::<Result<Vec<_>, _>>()?;
    let c = check_compatibility(mesh, &data.f, &data.g, &tags)?;
    Ok(CompatibilityReport { checked: cfg.is_pure_signorini(), value: c.value, admissible: c.admissible })
}

/// Meshes, assembles and solves at one resolution.
///
/// Layouts with Dirichlet data are solved directly at `α = 0`; pure Signorini
/// layouts go through the α-continuation and are rejected first if the
/// compatibility condition fails.
pub fn solve_stage(cfg: &ScenarioConfig, dd: &DomainDescriptor, resolution: usize) -> Result<Stage, LabError> {
    let t = Instant::now();
    let mesh = build_mesh(dd, resolution)?;
    let mesh_ms = ms(t);
    let t = Instant::now();
    let data = problem_data(cfg)?;
    let system = assemble_system(&mesh, &data, &cfg.layout()?)?;
    let assemble_ms = ms(t);
    if let Some(c) = system.compatibility() {
        if !c.admissible {
            return Err(Error::Incompatible { value: c.value }.into());
        }
    }
    let opts = cfg.solver.options();
    let t = Instant::now();
    let (solutions, increments) = if system.dirichlet.is_empty() {
        let cont = solve_problem_one(&system, &cfg.solver.schedule(), &opts)?;
        let dec = cont.increments.len() < 2 || cont.increments[1..].windows(2).all(|w| w[1] < w[0]);
        let inc = cont.increments.clone();
        (cont.solutions, Some((inc, dec)))
    } else {
        (vec![solve_alpha(&system, 0.0, &opts)?], None)
    };
    let solve_ms = ms(t);
    Ok(Stage { resolution, mesh, system, data, solutions, increments, opts, mesh_ms, assemble_ms, solve_ms })
}

fn coincidence_tol(cfg: &ScenarioConfig, stage: &Stage) -> f64 {
    cfg.solver
        .coincidence_tol
        .unwrap_or_else(|| default_tolerance(stage.opts.kkt_tol(), stage.mesh.h(), &stage.solution().u))
}

/// Coverage of the target segment, or of every Signorini edge without a target.
fn headline_coverage(cfg: &ScenarioConfig, mesh: &TriMesh, rep: &CoincidenceReport) -> Result<f64, LabError> {
    match &cfg.target {
        Some(t) => Ok(coverage(rep, mesh, &t.segment)?),
        None => Ok(rep.coverage),
    }
}

/// Mean `∂_νu_h` over segment `tag` from the multipliers: `(Σλ + ∫g) / |segment|`.
fn mean_flux(stage: &Stage, tag: &str) -> Result<f64, LabError> {
    let mesh = &stage.mesh;
    let t = mesh.tag_index(tag)?;
    let sol = stage.solution();
    let nodes = mesh.segment_nodes(t);
    let mut total = 0.0;
    for (k, n) in stage.system.constrained.iter().enumerate() {
        if nodes.binary_search(n).is_ok() {
            total += sol.multipliers[k];
        }
    }
    let mut len = 0.0;
    for e in mesh.segment_edges(t) {
        let l = mesh.edge_length(e);
        let (a, b) = (mesh.nodes()[e.nodes[0]], mesh.nodes()[e.nodes[1]]);
        total += l * stage.data.g.eval([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])])?;
        len += l;
    }
    Ok(total / len)
}

fn mesh_summary(mesh: &TriMesh) -> MeshSummary {
    MeshSummary {
        nodes: mesh.node_count(),
        triangles: mesh.triangles().len(),
        boundary_edges: mesh.boundary_edges().len(),
        h: mesh.h(),
        area: mesh.area(),
        euler_characteristic: mesh.euler_characteristic(),
        weakly_acute: mesh.is_weakly_acute(1e-12),
    }
}

fn trace_rows(cfg: &ScenarioConfig, stage: &Stage) -> Result<Vec<TraceRow>, LabError> {
    let mesh = &stage.mesh;
    let sys = &stage.system;
    let sol = stage.solution();
    let mut rows = Vec::new();
    for (tag, cond) in &cfg.boundary {
        if !matches!(cond, crate::config::ConditionSpec::Signorini) {
            continue;
        }
        let t = mesh.tag_index(tag)?;
        for chain in mesh.segment_chains(t) {
            let closed = chain.len() > 2 && chain.first() == chain.last();
            let nodes = if closed { &chain[..chain.len() - 1] } else { &chain[..] };
            let mut arc = 0.0;
            for (i, &n) in nodes.iter().enumerate() {
                if i > 0 {
                    let (a, b) = (mesh.nodes()[nodes[i - 1]], mesh.nodes()[n]);
                    arc += (a[0] - b[0]).hypot(a[1] - b[1]);
                }
                let Ok(k) = sys.constrained.binary_search(&n) else { continue };
                let p = mesh.nodes()[n];
                rows.push(TraceRow {
                    segment: tag.clone(),
                    arc_length: arc,
                    node: n,
                    x: p[0],
                    y: p[1],
                    gap: sol.u[n] - sys.obstacle[k],
                    multiplier: sol.multipliers[k],
                });
            }
        }
    }
    Ok(rows)
}

/// Obstacle extension and balance check on the target.
fn balance(
    target: &TargetConfig,
    dd: &DomainDescriptor,
    stage: &Stage,
) -> Result<(TubularFrame, ObstacleExtension, BalanceReport), LabError> {
    let frame = tubular_frame(dd, &target.segment)?;
    let width = target.obstacle_width.unwrap_or(target.depth.min(frame.rho_max));
    let ext = extend_obstacle(&stage.data.psi, &frame, width, stage.mesh.h(), 256)?;
    let alpha = stage.solution().alpha;
    let region = BalanceRegion { depth: target.depth, alpha, density: target.density };
    let b = check_balance(&stage.mesh, &stage.data.f, &stage.data.g, &ext, region, target.eps, target.delta)?;
    let rep = BalanceReport {
        segment: target.segment.clone(),
        eps: b.eps,
        delta: b.delta,
        alpha,
        interior_margin: b.interior_margin,
        flux_margin: b.flux_margin,
        interior_pass: b.interior_pass,
        flux_pass: b.flux_pass,
        interior_samples: b.interior_samples,
        flux_samples: b.flux_samples,
    };
    Ok((frame, ext, rep))
}

/// Projects a configured base point onto the frame.
fn base_point(base: &BasePoint, dd: &DomainDescriptor, frame: &TubularFrame) -> Result<(f64, Point), LabError> {
    let x = base.resolve(dd, &frame.tag)?;
    let (t, _) = frame.from_xy(x)?;
    if frame.locate(t).is_none() {
        return Err(LabError::Config(format!("base point ({}, {}) is not on segment `{}`", x[0], x[1], frame.tag)));
    }
    Ok((t, frame.point(t)))
}

/// Euclidean distance from `x0` to the boundary nodes outside segment `tag`.
fn dist_to_complement(mesh: &TriMesh, tag: usize, x0: Point) -> f64 {
    let on: Vec<usize> = mesh.segment_nodes(tag);
    mesh.boundary_nodes()
        .into_iter()
        .filter(|n| on.binary_search(n).is_err())
        .map(|n| {
            let p = mesh.nodes()[n];
            (p[0] - x0[0]).hypot(p[1] - x0[1])
        })
        .fold(f64::INFINITY, f64::min)
}

struct CertifyContext<'a> {
    dd: &'a DomainDescriptor,
    stage: &'a Stage,
    target: &'a TargetConfig,
    frame: &'a TubularFrame,
    shift: &'a [f64],
    m: f64,
    sup_abs: f64,
    weakly_acute: bool,
}

fn finish_certificate(
    ctx: &CertifyContext,
    cert: BarrierCertificate,
    report: VerificationReport,
    comparison: Option<ComparisonReport>,
    asserted: bool,
) -> CertificateReport {
    let cert = cert.with_report(report);
    let mut notes: Vec<String> = cert
        .checks
        .iter()
        .filter(|c| !c.holds)
        .map(|c| format!("violated: {} ({} vs {})", c.name, c.lhs, c.rhs))
        .collect();
    let comparison_ok = comparison.as_ref().is_none_or(|c| c.pass);
    if !comparison_ok && !ctx.weakly_acute {
        notes.push("comparison gap is a warning: the mesh is not weakly acute, so the discrete comparison principle is not guaranteed".into());
    }
    let pass = cert.pass() && (comparison_ok || !ctx.weakly_acute);
    CertificateReport {
        certificate: cert,
        comparison,
        m_measured: ctx.m,
        sup_abs: ctx.sup_abs,
        asserted,
        comparison_enforced: ctx.weakly_acute,
        pass,
        notes,
    }
}

fn certify(ctx: &CertifyContext, bc: &BarrierConfig) -> Result<CertificateReport, LabError> {
    let stage = ctx.stage;
    let mesh = &stage.mesh;
    let u = &stage.solution().u;
    let alpha = stage.solution().alpha;
    let seg = ctx.target.segment.clone();
    let (eps, delta) = (ctx.target.eps, ctx.target.delta);
    let tag = mesh.tag_index(&seg)?;
    match bc {
        BarrierConfig::Ring { r_eps, assert, density } => {
            let DomainKind::Ring { inner, outer } = ctx.dd.kind else {
                return Err(LabError::Config("ring barrier needs a ring domain".into()));
            };
            let r_eps = r_eps.unwrap_or(outer);
            let mut inp = SelectionInput::new(BarrierKind::Ring, eps, delta, ctx.m);
            inp.r0 = Some(inner);
            inp.r1 = Some(outer);
            inp.r_eps = Some(r_eps);
            let sel = select_constants(&inp)?;
            let b = ring_barrier(inner, sel.constants.c, 2)?;
            let region = BarrierRegion::Annulus { center: [0.0, 0.0], inner, outer: r_eps, segment: seg.clone() };
            let samples = RegionSamples::annulus(mesh, [0.0, 0.0], inner, r_eps, &seg, *density)?;
            let cert = BarrierCertificate::new(sel, region);
            let rep = verify_supersolution(&cert, &b, &samples, alpha)?;
            let cmp = comparison_check(u, Some(ctx.shift), &b, &cert.region, None, mesh, COMPARISON_TOL)?;
            Ok(finish_certificate(ctx, cert, rep, Some(cmp), *assert))
        }
        BarrierConfig::Quadratic { x0, rho, theta_density, assert, density } => {
            let (_, x0) = base_point(x0, ctx.dd, ctx.frame)?;
            let dist = dist_to_complement(mesh, tag, x0);
            let r = dist.min(rho.unwrap_or(ctx.frame.rho_max));
            let th = theta0(ctx.frame, r, *theta_density)?;
            let mut inp = SelectionInput::new(BarrierKind::Quadratic, eps, delta, ctx.m);
            inp.r = Some(r);
            inp.dist_to_complement = Some(dist);
            inp.theta0 = Some(th);
            let sel = select_constants(&inp)?;
            let b = quadratic_barrier(x0, sel.constants.c, 2)?;
            let region = BarrierRegion::Ball { x0, radius: r, segment: seg.clone() };
            let samples = RegionSamples::ball(mesh, ctx.dd, ctx.frame, x0, r, *density)?;
            let cert = BarrierCertificate::new(sel, region);
            let rep = verify_supersolution(&cert, &b, &samples, alpha)?;
            let cmp = comparison_check(u, Some(ctx.shift), &b, &cert.region, None, mesh, COMPARISON_TOL)?;
            Ok(finish_certificate(ctx, cert, rep, Some(cmp), *assert))
        }
        BarrierConfig::Intrinsic { x0, radius, depth, tau_min, samples, assert, density } => {
            let (_, x0) = base_point(x0, ctx.dd, ctx.frame)?;
            let region = IntrinsicRegion { tau_min: *tau_min, radius: *radius, depth: *depth, samples: *samples };
            let metric = intrinsic_distance(ctx.frame, x0, mesh, region)?;
            let to_ends = if ctx.frame.is_closed() {
                f64::INFINITY
            } else {
                metric.d0(ctx.frame.t_start).min(metric.d0(ctx.frame.t_end))
            };
            let mut inp = SelectionInput::new(BarrierKind::Intrinsic, eps, delta, ctx.m);
            inp.r = Some(*radius);
            inp.c_delta = Some(metric.c_delta);
            inp.dist_to_complement = Some(to_ends);
            let sel = select_constants(&inp)?;
            let b = intrinsic_barrier(&metric, sel.constants.c)?;
            let cregion = BarrierRegion::Collar { x0, radius: *radius, depth: *depth, segment: seg.clone() };
            let samples = RegionSamples::collar(&metric, mesh, *density)?;
            let cert = BarrierCertificate::new(sel, cregion);
            let rep = verify_supersolution(&cert, &b, &samples, alpha)?;
            let cmp = comparison_check(u, Some(ctx.shift), &b, &cert.region, Some(&metric), mesh, COMPARISON_TOL)?;
            let mut out = finish_certificate(ctx, cert, rep, Some(cmp), *assert);
            out.notes.push(format!(
                "c_d = {:.6}, C_d = {:.6}, c_delta = {:.6}",
                metric.c_d, metric.big_c_d, metric.c_delta
            ));
            Ok(out)
        }
        BarrierConfig::Ode { x0, length, b, assert, density } => {
            let (t0, _) = base_point(x0, ctx.dd, ctx.frame)?;
            let b = b.unwrap_or_else(|| ctx.frame.curvature(t0));
            let mut inp = SelectionInput::new(BarrierKind::Ode, eps, delta, ctx.m);
            inp.b = Some(b);
            inp.r = Some(*length);
            inp.extrapolated = b == 0.0;
            let sel = select_constants(&inp)?;
            let ode = if b == 0.0 {
                ode_barrier_extrapolated(sel.constants.c, delta)?
            } else {
                ode_barrier(sel.constants.c, delta, b)?
            };
            let cert = BarrierCertificate::new(sel, BarrierRegion::Interval { length: *length });
            let rep = verify_ode(&cert, &ode, *density)?;
            Ok(finish_certificate(ctx, cert, rep, None, *assert))
        }
    }
}

/// Worst verification residual, or the violated margin `rhs - lhs` of an infeasible selection.
fn certificate_value(c: &CertificateReport) -> f64 {
    if let Some(bad) = c.certificate.checks.iter().find(|k| !k.holds) {
        return bad.rhs - bad.lhs;
    }
    let mut v = c.certificate.report.as_ref().map_or(f64::NAN, |r| r.interior.worst.min(r.cap.worst).min(r.flux.worst));
    if let Some(cmp) = &c.comparison {
        if c.comparison_enforced {
            v = v.min(cmp.tol - cmp.worst_gap);
        }
    }
    v
}

/// Runs a scenario and returns the report with the discrete objects of the main resolution.
pub fn run_artifacts(cfg: &ScenarioConfig, ov: &Overrides) -> Result<Artifacts, LabError> {
    let start = Instant::now();
    let cfg = ov.apply(cfg);
    cfg.validate()?;
    let dd = cfg.descriptor()?;
    let resolutions = cfg.resolutions.clone();
    let mut stages: Vec<Stage> = thread::scope(|s| {
        let handles: Vec<_> = resolutions.iter().map(|&r| {
            let (cfg, dd) = (&cfg, &dd);
            s.spawn(move || solve_stage(cfg, dd, r))
        }).collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect::<Result<Vec<_>, _>>()
    })?;
    let stage = stages.pop().expect("at least one resolution");
    let mesh = &stage.mesh;
    let sol = stage.solution();
    let kkt_tol = stage.opts.kkt_tol();
    let mut assertions = Vec::new();

    let compat = compatibility(&cfg, mesh, &stage.data)?;

    let tol = coincidence_tol(&cfg, &stage);
    let mut solves = Vec::new();
    for s in &stage.solutions {
        let rep = extract_coincidence(mesh, &stage.system, s, tol)?;
        let r = s.residuals.max();
        solves.push(SolveReport {
            alpha: s.alpha,
            method: s.method,
            iterations: s.iterations,
            residuals: s.residuals,
            kkt_tol,
            kkt_pass: r <= kkt_tol,
            active: s.active.len(),
            coverage: headline_coverage(&cfg, mesh, &rep)?,
        });
        assertions.push(Assertion::le(format!("KKT residual at alpha = {:e}", s.alpha), r, kkt_tol));
    }

    let continuation = stage.increments.as_ref().map(|(inc, dec)| ContinuationReport {
        schedule: stage.solutions.iter().map(|s| s.alpha).collect(),
        increments: inc.clone(),
        decreasing_after_first: *dec,
        stagnation: inc.windows(4).any(|w| w[1] >= w[0] && w[2] >= w[1] && w[3] >= w[2]),
    });

    let t_cert = Instant::now();
    let crep = extract_coincidence(mesh, &stage.system, sol, tol)?;
    let mut coincidence = CoincidenceSummary {
        tol,
        nodes: crep.nodes.clone(),
        coverage: crep.coverage,
        segment: None,
        segment_coverage: None,
        segment_nodes: None,
        segment_max_gap: None,
        flux_balance_integral: None,
    };
    let mut balance_report = None;
    let mut stability = None;
    let mut certificates = Vec::new();
    if let Some(target) = &cfg.target {
        let tag = mesh.tag_index(&target.segment)?;
        let on = mesh.segment_nodes(tag);
        let on_gaps: Vec<(usize, f64)> =
            crep.gaps.iter().copied().filter(|(n, _)| on.binary_search(n).is_ok()).collect();
        let (frame, ext, bal) = balance(target, &dd, &stage)?;
        coincidence.segment = Some(target.segment.clone());
        coincidence.segment_coverage = Some(coverage(&crep, mesh, &target.segment)?);
        coincidence.segment_nodes =
            Some((on_gaps.iter().filter(|(_, g)| *g <= tol).count(), on_gaps.len()));
        coincidence.segment_max_gap = on_gaps.iter().map(|&(_, g)| g).reduce(f64::max);
        coincidence.flux_balance_integral = Some(flux_balance_integral(mesh, &crep, &stage.data.g, Some(&ext))?);
        assertions.push(Assertion::ge(
            format!("force balance margin on {}", target.segment),
            bal.interior_margin,
            target.eps,
        ));
        assertions.push(Assertion::ge(format!("flux balance margin on {}", target.segment), bal.flux_margin, target.delta));
        balance_report = Some(bal);

        if stage.solutions.len() > 1 {
            let st = alpha_stability(mesh, &stage.system, &stage.solutions, &target.segment, tol)?;
            let n = st.per_alpha.len();
            let diff = (st.per_alpha[n - 1].1 - st.per_alpha[n - 2].1).abs();
            assertions.push(Assertion::flag(
                "coincidence set on target identical for the last two alpha values",
                diff,
                "same node set",
                st.last_two_equal,
            ));
            stability = Some(st);
        }
        if let Some(c) = &continuation {
            let worst = c.increments.get(1..).unwrap_or(&[]).windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            assertions.push(Assertion::flag(
                "continuation increments strictly decreasing after the first step",
                worst,
                "< 0",
                c.decreasing_after_first,
            ));
        }

        let shift: Vec<f64> = mesh.nodes().iter().map(|&p| ext.value(p)).collect::<Result<_, _>>()?;
        let ut: Vec<f64> = sol.u.iter().zip(&shift).map(|(a, b)| a - b).collect();
        let ctx = CertifyContext {
            dd: &dd,
            stage: &stage,
            target,
            frame: &frame,
            shift: &shift,
            m: ut.iter().fold(0.0, |m: f64, &x| m.max(x)),
            sup_abs: ut.iter().fold(0.0, |m: f64, &x| m.max(x.abs())),
            weakly_acute: mesh.is_weakly_acute(1e-12),
        };
        for bc in &cfg.barriers {
            let c = certify(&ctx, bc)?;
            if c.asserted {
                assertions.push(Assertion::flag(
                    format!("{} barrier certificate", c.certificate.kind.name()),
                    certificate_value(&c),
                    ">= 0 (feasible constants, residuals >= -1e-10, comparison gap <= 1e-8)",
                    c.pass,
                ));
            }
            certificates.push(c);
        }
    }
    let certify_ms = ms(t_cert);

    let headline = coincidence.segment_coverage.unwrap_or(coincidence.coverage);
    if let Some(min) = cfg.expect.coverage_min {
        assertions.push(Assertion::ge("coverage of the target", headline, min));
    }
    if let Some(bound) = cfg.expect.trace_max {
        let m = coincidence.segment_max_gap.unwrap_or(f64::NAN);
        assertions.push(Assertion::le("max (u_h - psi_h) on the target", m, bound));
    }

    let mut all_stages: Vec<&Stage> = stages.iter().collect();
    all_stages.push(&stage);
    let mut refinement = Vec::new();
    for s in &all_stages {
        let t = coincidence_tol(&cfg, s);
        let r = extract_coincidence(&s.mesh, &s.system, s.solution(), t)?;
        refinement.push(RefinementRow { resolution: s.resolution, h: s.mesh.h(), coverage: headline_coverage(&cfg, &s.mesh, &r)? });
    }
    if cfg.expect.refinement_monotone {
        let worst = refinement.windows(2).map(|w| w[1].coverage - w[0].coverage).fold(f64::INFINITY, f64::min);
        assertions.push(Assertion::flag(
            "coverage non-decreasing under refinement",
            worst,
            ">= 0",
            refinement.windows(2).all(|w| w[1].coverage >= w[0].coverage),
        ));
    }

    let convergence = match exact::build(&cfg)? {
        None => None,
        Some(ex) => Some(convergence_table(&cfg, &all_stages, &ex, &mut assertions)?),
    };

    let trace = trace_rows(&cfg, &stage)?;
    let field = mesh.nodes().iter().zip(&sol.u).map(|(p, &u)| [p[0], p[1], u]).collect();
    let pass = assertions.iter().all(|a| a.pass);
    let timings = Timings {
        mesh_ms: stage.mesh_ms,
        assemble_ms: stage.assemble_ms,
        solve_ms: stage.solve_ms,
        certify_ms,
        total_ms: ms(start),
    };
    let report = RunReport {
        scenario: cfg.name.clone(),
        config: cfg.clone(),
        resolution: stage.resolution,
        mesh: mesh_summary(mesh),
        compatibility: compat,
        balance: balance_report,
        solves,
        continuation,
        coincidence,
        stability,
        certificates,
        convergence,
        refinement,
        trace,
        field,
        assertions,
        pass,
        timings,
    };
    Ok(Artifacts { report, stage })
}

fn convergence_table(
    cfg: &ScenarioConfig,
    stages: &[&Stage],
    ex: &AnnulusRadial,
    assertions: &mut Vec<Assertion>,
) -> Result<ConvergenceTable, LabError> {
    let contact = cfg
        .boundary
        .iter()
        .find(|(_, c)| matches!(c, crate::config::ConditionSpec::Signorini))
        .map(|(t, _)| t.clone())
        .ok_or_else(|| LabError::Config("exact solution needs a Signorini segment".into()))?;
    let mut rows = Vec::new();
    for s in stages {
        let (l2, h1) = exact::error_norms(&s.mesh, &s.solution().u, ex);
        rows.push(ConvergenceRow { resolution: s.resolution, h: s.mesh.h(), l2_error: l2, h1_error: h1, flux: mean_flux(s, &contact)? });
    }
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let es: Vec<f64> = rows.iter().map(|r| r.h1_error).collect();
    let slope = exact::loglog_slope(&hs, &es);
    let exact_flux = ex.inner_flux();
    let flux = rows.last().map_or(f64::NAN, |r| r.flux);
    let flux_rel_error = ((flux - exact_flux) / exact_flux).abs();
    if let (Some([lo, hi]), Some(s)) = (cfg.expect.h1_slope, slope) {
        assertions.push(Assertion::within("H1 error slope", s, lo, hi));
    }
    if let Some(tol) = cfg.expect.flux_rel_tol {
        assertions.push(Assertion::le("relative error of the contact flux", flux_rel_error, tol));
    }
    Ok(ConvergenceTable { rows, h1_slope: slope, exact_flux, flux_rel_error })
}

pub fn run(cfg: &ScenarioConfig, ov: &Overrides) -> Result<RunReport, LabError> {
    run_artifacts(cfg, ov).map(|a| a.report)
}

/// Runs scenarios concurrently; results come back in input order.
pub fn run_batch(cfgs: &[ScenarioConfig], ov: &Overrides) -> Vec<Result<Artifacts, LabError>> {
    thread::scope(|s| {
        let handles: Vec<_> = cfgs.iter().map(|c| s.spawn(move || run_artifacts(c, ov))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    })
}
