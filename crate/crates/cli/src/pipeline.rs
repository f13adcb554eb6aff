//! Lazy artifact chain behind the CLI commands. Every stage is computed at
//! most once per process, in dependency order, on one thread; the weight
//! matrix in particular is built exactly once and shared.

use std::collections::HashSet;
use std::time::Instant;

use xyergo::{
    anchored, aubry_letters, aubry_report, build_graph, certify_twist, default_max_iters,
    diagonal_analysis, gap_phi, mane_matrix, mather_support, multi_descent, optimal_mean,
    peierls_letter, reduce, reweight, sequence_barrier, solve_subaction, static_check,
    tpo_experiment, AubryReport, BarrierMatrix, Error, EventuallyPeriodicPoint, GapTable,
    LetterGrid, ManeMatrix, MatherSupport, OrbitDescentTrace, ReducedMatrix, ReweightedGraph,
    SequenceBarrierResult, SpectralResult, StaticCertificate, Subaction, TPOReport, WeightMatrix,
};

use crate::config::RunConfig;

/// One recorded pass/fail line; the process exits zero iff every check
/// passed and no stage errored.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointType {
    Fixed,
    Letter,
}

#[derive(Clone, Debug)]
pub struct BarrierQuery {
    pub from: f64,
    pub to: f64,
    pub point_type: PointType,
}

#[derive(Clone, Debug)]
pub struct BarrierQueryOutcome {
    pub query: BarrierQuery,
    pub from_node: usize,
    pub to_node: usize,
    /// Letter-level barrier entry for letter queries.
    pub letter_value: Option<f64>,
    /// Full sequence result for fixed-point queries.
    pub sequence: Option<SequenceBarrierResult>,
}

/// Experiment parameters; subcommand flags override these defaults.
#[derive(Clone, Debug)]
pub struct Params {
    pub descent_ns: Vec<usize>,
    pub descent_starts: usize,
    pub descent_tol: f64,
    pub descent_sweeps: usize,
    pub gap_delta: f64,
    pub gap_n_max: usize,
    pub tpo_a: f64,
    pub tpo_eps: f64,
    pub tpo_trials: usize,
    pub tpo_noise: Option<f64>,
    pub barrier_query: Option<BarrierQuery>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            descent_ns: vec![2, 3, 4],
            descent_starts: 8,
            descent_tol: 1e-10,
            descent_sweeps: 400,
            gap_delta: 0.25,
            gap_n_max: 12,
            tpo_a: 0.3,
            tpo_eps: 0.05,
            tpo_trials: 16,
            tpo_noise: None,
            barrier_query: None,
        }
    }
}

pub struct Engine {
    pub config: RunConfig,
    pub grid: LetterGrid,
    done: HashSet<String>,
    weights: Option<WeightMatrix>,
    spectral: Option<SpectralResult>,
    reduced: Option<ReducedMatrix>,
    sub: Option<Subaction>,
    anchored_values: Option<Vec<f64>>,
    rw: Option<ReweightedGraph>,
    mane: Option<ManeMatrix>,
    letters: Option<Vec<usize>>,
    barrier: Option<BarrierMatrix>,
    aubry: Option<AubryReport>,
    mather: Option<MatherSupport>,
    descent: Vec<(usize, Vec<OrbitDescentTrace>)>,
    gap: Option<GapTable>,
    tpo: Option<TPOReport>,
    barrier_queries: Vec<BarrierQueryOutcome>,
    static_results: Vec<StaticCertificate>,
    pub checks: Vec<Check>,
    pub timings: Vec<(String, f64)>,
}

impl Engine {
    pub fn new(config: RunConfig) -> Result<Self, Error> {
        let grid = LetterGrid::new(config.n_cells)?;
        Ok(Engine {
            config,
            grid,
            done: HashSet::new(),
            weights: None,
            spectral: None,
            reduced: None,
            sub: None,
            anchored_values: None,
            rw: None,
            mane: None,
            letters: None,
            barrier: None,
            aubry: None,
            mather: None,
            descent: Vec::new(),
            gap: None,
            tpo: None,
            barrier_queries: Vec::new(),
            static_results: Vec::new(),
            checks: Vec::new(),
            timings: Vec::new(),
        })
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn weights(&mut self) -> Result<&WeightMatrix, Error> {
        if self.weights.is_none() {
            let t = Instant::now();
            let w = build_graph(&self.config.potential, self.grid)?;
            self.timings.push(("weights".into(), t.elapsed().as_secs_f64()));
            self.weights = Some(w);
        }
        Ok(self.weights.as_ref().unwrap())
    }

    pub fn spectral(&mut self) -> Result<&SpectralResult, Error> {
        if self.spectral.is_none() {
            self.weights()?;
            let t = Instant::now();
            let spec = &self.config.potential;
            let mean = optimal_mean(self.weights.as_ref().unwrap())?;
            let diag = diagonal_analysis(spec, self.grid)?;
            let twist = certify_twist(spec, self.grid.node_count().max(64))?;
            let result = SpectralResult {
                n_cells: self.grid.n_cells(),
                alpha_grid: mean.alpha,
                alpha_diag_grid: diag.alpha_diag_grid,
                alpha_diag_refined: diag.alpha_diag_refined,
                refined_argmin: diag.refined_argmin,
                agreement_gap: mean.alpha - diag.alpha_diag_grid,
                witness: mean.witness,
                witness_mean: mean.witness_mean,
                twist,
                minimizer_set: diag.minimizer_set,
            };
            self.timings.push(("spectral".into(), t.elapsed().as_secs_f64()));
            self.spectral = Some(result);
        }
        Ok(self.spectral.as_ref().unwrap())
    }

    fn reduced(&mut self) -> Result<&ReducedMatrix, Error> {
        if self.reduced.is_none() {
            let alpha = self.spectral()?.alpha_grid;
            let r = reduce(self.weights.as_ref().unwrap(), alpha);
            self.reduced = Some(r);
        }
        Ok(self.reduced.as_ref().unwrap())
    }

    fn subaction(&mut self) -> Result<&Subaction, Error> {
        if self.sub.is_none() {
            self.reduced()?;
            let t = Instant::now();
            let sub = solve_subaction(
                self.reduced.as_ref().unwrap(),
                self.config.tolerances.solver_tol,
                default_max_iters(self.grid.node_count()),
            )?;
            let rw = reweight(self.reduced.as_ref().unwrap(), &sub)?;
            self.timings.push(("subaction".into(), t.elapsed().as_secs_f64()));
            self.sub = Some(sub);
            self.rw = Some(rw);
        }
        Ok(self.sub.as_ref().unwrap())
    }

    fn mane(&mut self) -> Result<&ManeMatrix, Error> {
        if self.mane.is_none() {
            self.subaction()?;
            let t = Instant::now();
            let mane = mane_matrix(self.rw.as_ref().unwrap())?;
            self.timings.push(("mane".into(), t.elapsed().as_secs_f64()));
            self.mane = Some(mane);
        }
        Ok(self.mane.as_ref().unwrap())
    }

    fn aubry_letters(&mut self) -> Result<&[usize], Error> {
        if self.letters.is_none() {
            self.mane()?;
            let letters = aubry_letters(self.mane.as_ref().unwrap(), self.config.tol_zero())?;
            self.letters = Some(letters);
        }
        Ok(self.letters.as_ref().unwrap())
    }

    fn barrier(&mut self) -> Result<&BarrierMatrix, Error> {
        if self.barrier.is_none() {
            self.aubry_letters()?;
            let t = Instant::now();
            let barrier = peierls_letter(
                self.reduced.as_ref().unwrap(),
                self.mane.as_ref().unwrap(),
                self.letters.as_ref().unwrap(),
                self.config.window(),
            )?;
            self.timings.push(("barrier".into(), t.elapsed().as_secs_f64()));
            self.barrier = Some(barrier);
        }
        Ok(self.barrier.as_ref().unwrap())
    }

    fn aubry(&mut self) -> Result<&AubryReport, Error> {
        if self.aubry.is_none() {
            self.barrier()?;
            let t = Instant::now();
            let report = aubry_report(
                self.grid,
                self.mane.as_ref().unwrap(),
                self.barrier.as_ref().unwrap(),
                &self.spectral.as_ref().unwrap().minimizer_set,
                self.config.tol_zero(),
            )?;
            let anchor = anchored(
                &self.sub.as_ref().unwrap().values,
                &report.aubry_letters,
            )?;
            self.timings.push(("aubry".into(), t.elapsed().as_secs_f64()));
            self.aubry = Some(report);
            self.anchored_values = Some(anchor);
        }
        Ok(self.aubry.as_ref().unwrap())
    }

    /// Run one named command, recording its checks. Repeats are no-ops.
    pub fn execute(&mut self, command: &str, params: &Params) -> Result<(), Error> {
        if !self.done.insert(command.to_string()) {
            return Ok(());
        }
        match command {
            "twist" => self.cmd_twist(),
            "alpha" => self.cmd_alpha(),
            "subaction" => self.cmd_subaction(),
            "mane" => self.cmd_mane(),
            "barrier" => self.cmd_barrier(params),
            "aubry" => self.cmd_aubry(),
            "descent" => self.cmd_descent(params),
            "gap" => self.cmd_gap(params),
            "tpo" => self.cmd_tpo(params),
            other => Err(Error::Invalid(format!("unknown command '{other}'"))),
        }
    }

    fn cmd_twist(&mut self) -> Result<(), Error> {
        let spectral = self.spectral()?;
        let passed = spectral.twist.passed;
        let detail = format!(
            "max mixed partial {:.6e} at density {}",
            spectral.twist.max_mixed_partial, spectral.twist.sample_density
        );
        self.check("twist certificate", passed, detail);
        Ok(())
    }

    fn cmd_alpha(&mut self) -> Result<(), Error> {
        let spectral = self.spectral()?;
        let twist_ok = spectral.twist.passed;
        let gap = spectral.agreement_gap;
        let witness = spectral.witness.clone();
        self.check(
            "alpha witness cycle",
            !witness.is_empty(),
            format!("witness {witness:?}"),
        );
        if twist_ok {
            self.check(
                "alpha diagonal identity",
                gap.abs() <= 1e-12,
                format!("agreement gap {gap:.3e}"),
            );
        }
        Ok(())
    }

    fn cmd_subaction(&mut self) -> Result<(), Error> {
        self.subaction()?;
        let residual = self.sub.as_ref().unwrap().residual;
        let iterations = self.sub.as_ref().unwrap().iterations;
        let tol = self.config.tolerances.solver_tol;
        self.check(
            "subaction converged",
            residual <= tol,
            format!("residual {residual:.3e} after {iterations} sweeps"),
        );
        let min_entry = self.rw.as_ref().unwrap().matrix().min_entry();
        self.check(
            "reweighted graph nonnegative",
            min_entry >= -1e-12,
            format!("min entry {min_entry:.3e}"),
        );
        Ok(())
    }

    fn cmd_mane(&mut self) -> Result<(), Error> {
        self.mane()?;
        let mane = self.mane.as_ref().unwrap();
        let n = mane.dim();
        let mut worst = 0.0f64;
        for a in 0..n {
            for c in 0..n {
                let head = mane.get(a, c);
                for b in 0..n {
                    let violation = mane.get(a, b) - head - mane.get(c, b);
                    if violation > worst {
                        worst = violation;
                    }
                }
            }
        }
        self.check(
            "mane triangle inequality",
            worst <= 1e-12,
            format!("worst violation {worst:.3e}"),
        );
        Ok(())
    }

    fn cmd_barrier(&mut self, params: &Params) -> Result<(), Error> {
        self.barrier()?;
        let barrier = self.barrier.as_ref().unwrap();
        let n = self.grid.node_count();
        let mut worst = f64::NEG_INFINITY;
        for a in 0..n {
            for b in 0..n {
                let excess = barrier.windowed_liminf().get(a, b) - barrier.get(a, b);
                if excess > worst {
                    worst = excess;
                }
            }
        }
        let agreement = barrier.agreement;
        self.check(
            "windowed barrier below closed form",
            worst <= 1e-9,
            format!("worst excess {worst:.3e}, two-sided agreement {agreement:.3e}"),
        );
        if let Some(query) = params.barrier_query.clone() {
            self.run_barrier_query(query)?;
        }
        Ok(())
    }

    fn run_barrier_query(&mut self, query: BarrierQuery) -> Result<(), Error> {
        let from_node = self.grid.nearest_node(query.from);
        let to_node = self.grid.nearest_node(query.to);
        let outcome = match query.point_type {
            PointType::Letter => BarrierQueryOutcome {
                query,
                from_node,
                to_node,
                letter_value: Some(self.barrier.as_ref().unwrap().get(from_node, to_node)),
                sequence: None,
            },
            PointType::Fixed => {
                let x = EventuallyPeriodicPoint::fixed(from_node);
                let y = EventuallyPeriodicPoint::fixed(to_node);
                let result = sequence_barrier(
                    &x,
                    &y,
                    self.reduced.as_ref().unwrap(),
                    self.barrier.as_ref().unwrap(),
                )?;
                BarrierQueryOutcome {
                    query,
                    from_node,
                    to_node,
                    letter_value: None,
                    sequence: Some(result),
                }
            }
        };
        self.barrier_queries.push(outcome);
        Ok(())
    }

    fn cmd_aubry(&mut self) -> Result<(), Error> {
        self.aubry()?;
        let report = self.aubry.as_ref().unwrap().clone();
        let mut flattened: Vec<usize> = report.classes.iter().flatten().copied().collect();
        flattened.sort_unstable();
        self.check(
            "classes partition the aubry letters",
            flattened == report.aubry_letters,
            format!("{} classes over {} letters", report.classes.len(), report.aubry_letters.len()),
        );

        let tol_zero = self.config.tol_zero();
        let mut statics = Vec::new();
        for a in 0..self.grid.node_count() {
            let cert = static_check(
                &[a],
                self.reduced.as_ref().unwrap(),
                self.mane.as_ref().unwrap(),
                tol_zero,
            )?;
            if cert.is_static {
                statics.push(a);
            }
        }
        self.check(
            "single letter statics match aubry",
            statics == report.aubry_letters,
            format!("{} static letters", statics.len()),
        );

        let twist_ok = self.spectral.as_ref().unwrap().twist.passed;
        if twist_ok {
            let cell = self.grid.spacing();
            let worst = report.m_distance.iter().copied().fold(0.0f64, f64::max);
            self.check(
                "aubry letters trace the minimizer set",
                worst <= cell + 1e-9,
                format!("worst distance {worst:.3e}, cell {cell:.3e}"),
            );
        }

        match mather_support(
            self.spectral.as_ref().unwrap(),
            self.reduced.as_ref().unwrap(),
            &report.aubry_letters,
            tol_zero,
        ) {
            Ok(support) => {
                let detail = match support.hausdorff {
                    Some(h) => format!("hausdorff {h:.3e}"),
                    None => "no twist certificate, containment unchecked".to_string(),
                };
                self.check("mather support witnessed", true, detail);
                self.mather = Some(support);
            }
            Err(err @ (Error::WitnessEscapes { .. } | Error::SupportMismatch(_))) => {
                self.check("mather support witnessed", false, err.to_string());
            }
            Err(other) => return Err(other),
        }
        Ok(())
    }

    fn cmd_descent(&mut self, params: &Params) -> Result<(), Error> {
        let spec = self.config.potential.clone();
        let seeds: Vec<u64> = (0..params.descent_starts as u64)
            .map(|k| self.config.seed.wrapping_add(k))
            .collect();
        let t = Instant::now();
        for &n in &params.descent_ns {
            match multi_descent(&spec, n, &seeds, params.descent_tol, params.descent_sweeps) {
                Ok(traces) => {
                    let all_converged = traces.iter().all(|tr| tr.converged);
                    let worst_residual = traces
                        .iter()
                        .map(|tr| tr.residual)
                        .fold(0.0f64, f64::max);
                    self.check(
                        &format!("descent converged at n={n}"),
                        all_converged,
                        format!("worst residual {worst_residual:.3e} over {} starts", traces.len()),
                    );
                    self.descent.push((n, traces));
                }
                Err(err @ Error::NotTwist { .. }) => {
                    self.check(&format!("descent converged at n={n}"), false, err.to_string());
                }
                Err(other) => return Err(other),
            }
        }
        self.timings.push(("descent".into(), t.elapsed().as_secs_f64()));
        Ok(())
    }

    fn cmd_gap(&mut self, params: &Params) -> Result<(), Error> {
        let t = Instant::now();
        let table = gap_phi(
            &self.config.potential,
            self.config.n_cells,
            params.gap_delta,
            params.gap_n_max,
        )?;
        self.timings.push(("gap".into(), t.elapsed().as_secs_f64()));
        let floor = table
            .per_n
            .iter()
            .map(|&(_, v)| v)
            .fold(f64::INFINITY, f64::min);
        self.check(
            "gap function nonnegative",
            table.far_empty || floor >= -1e-12,
            format!("floor {floor:.3e}, far_empty {}", table.far_empty),
        );
        self.gap = Some(table);
        Ok(())
    }

    fn cmd_tpo(&mut self, params: &Params) -> Result<(), Error> {
        let noise = params.tpo_noise.unwrap_or(params.tpo_eps / 2.0);
        let t = Instant::now();
        match tpo_experiment(
            &self.config.potential,
            params.tpo_a,
            params.tpo_eps,
            self.grid,
            params.tpo_trials,
            noise,
            self.config.seed,
        ) {
            Ok(report) => {
                self.timings.push(("tpo".into(), t.elapsed().as_secs_f64()));
                self.check(
                    "tpo unique minimum",
                    report.unique_min,
                    format!(
                        "argmin {:.6} curvature {:.3e} radius {:.3e}",
                        report.argmin, report.second_derivative, report.robustness_radius
                    ),
                );
                self.tpo = Some(report);
                Ok(())
            }
            Err(err @ Error::NotTwist { .. }) => {
                self.check("tpo unique minimum", false, err.to_string());
                Ok(())
            }
            Err(other) => Err(other),
        }
    }

    pub fn execute_static(&mut self, word: &[usize]) -> Result<(), Error> {
        self.mane()?;
        let cert = static_check(
            word,
            self.reduced.as_ref().unwrap(),
            self.mane.as_ref().unwrap(),
            self.config.tol_zero(),
        )?;
        self.static_results.push(cert);
        Ok(())
    }

    pub fn peek_weights(&self) -> Option<&WeightMatrix> {
        self.weights.as_ref()
    }

    pub fn peek_spectral(&self) -> Option<&SpectralResult> {
        self.spectral.as_ref()
    }

    pub fn peek_reduced(&self) -> Option<&ReducedMatrix> {
        self.reduced.as_ref()
    }

    pub fn peek_subaction(&self) -> Option<&Subaction> {
        self.sub.as_ref()
    }

    pub fn peek_anchored(&self) -> Option<&[f64]> {
        self.anchored_values.as_deref()
    }

    pub fn peek_mane(&self) -> Option<&ManeMatrix> {
        self.mane.as_ref()
    }

    pub fn peek_barrier(&self) -> Option<&BarrierMatrix> {
        self.barrier.as_ref()
    }

    pub fn peek_aubry(&self) -> Option<&AubryReport> {
        self.aubry.as_ref()
    }

    pub fn peek_mather(&self) -> Option<&MatherSupport> {
        self.mather.as_ref()
    }

    pub fn peek_descent(&self) -> &[(usize, Vec<OrbitDescentTrace>)] {
        &self.descent
    }

    pub fn peek_gap(&self) -> Option<&GapTable> {
        self.gap.as_ref()
    }

    pub fn peek_tpo(&self) -> Option<&TPOReport> {
        self.tpo.as_ref()
    }

    pub fn peek_barrier_queries(&self) -> &[BarrierQueryOutcome] {
        &self.barrier_queries
    }

    pub fn peek_static(&self) -> &[StaticCertificate] {
        &self.static_results
    }
}
