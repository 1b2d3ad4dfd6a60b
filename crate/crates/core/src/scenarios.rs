//! Named scenarios and seeded random scenario generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::model::{
    BoundaryCondition, BoundaryPair, Coefficient, CoefficientField, FluxLaw, MovingDomain, Profile, Reaction,
    ScenarioConfig, TimeFunction, TimeSettings, TrigTerm,
};

fn expr(s: &str) -> Expr {
    Expr::parse(s).expect("builtin expression parses")
}

fn scenario(name: &str, field: CoefficientField, domain: MovingDomain, bcs: BoundaryPair, u0: &str) -> ScenarioConfig {
    ScenarioConfig::new(name, field, domain, bcs, Profile::Expr(expr(u0)))
}

/// Heat equation with two Dirichlet modes; one zero leaves through `x = 1`
/// at `t = ln 2 / (3π²)`.
pub fn two_mode_heat() -> ScenarioConfig {
    let mut cfg = scenario(
        "two-mode-heat",
        CoefficientField::heat(),
        MovingDomain::fixed(0.0, 1.0),
        BoundaryPair::both(BoundaryCondition::DirichletZero),
        "sin(pi*x) + sin(2*pi*x)",
    );
    cfg.grid.nodes = 801;
    cfg.time = TimeSettings::new(0.05, 1e-4);
    cfg
}

/// Two interior zeros colliding at `(0.5, 0)`.
pub fn interior_merge() -> ScenarioConfig {
    let mut cfg = scenario(
        "interior-merge",
        CoefficientField::heat(),
        MovingDomain::fixed(0.0, 1.0),
        BoundaryPair::both(BoundaryCondition::DirichletZero),
        "exp(-pi^2*t)*sin(pi*x) + exp(-9*pi^2*t)*sin(3*pi*x)",
    );
    cfg.grid.nodes = 801;
    cfg.time = TimeSettings::new(0.04, 1.6e-5);
    cfg.time.start = -0.02;
    cfg.time.output_every = 10;
    cfg
}

/// Robin ends with a zero that leaves through `x = 0`.
pub fn robin_touch(offset: f64, beta: f64) -> ScenarioConfig {
    let mut cfg = scenario(
        "robin-basic",
        CoefficientField::heat(),
        MovingDomain::fixed(0.0, 1.0),
        BoundaryPair::both(BoundaryCondition::robin(beta)),
        &format!("x - {offset}"),
    );
    cfg.grid.nodes = 201;
    cfg.time = TimeSettings::new(0.05, 1e-4);
    cfg
}

/// Free boundaries without reaction, `u0 = cos(πx/2)` on `[-1, 1]`.
pub fn stefan_conservation(nodes: usize, dt: f64, horizon: f64) -> ScenarioConfig {
    let mut cfg = scenario(
        "stefan-conservation",
        CoefficientField::heat(),
        MovingDomain::fixed(-1.0, 1.0),
        BoundaryPair::both(BoundaryCondition::FreeStefan { mu: 1.0 }),
        "cos(pi*x/2)",
    );
    cfg.grid.nodes = nodes;
    cfg.time = TimeSettings::new(horizon, dt);
    cfg
}

/// Bistable reaction with a periodic threshold and a small asymmetric bump
/// between free boundaries; the bump vanishes and relaxes to a symmetric
/// shape.
pub fn stefan_bistable() -> ScenarioConfig {
    let field = CoefficientField::heat().with_reaction(Reaction::Bistable {
        theta: TimeFunction::Periodic { mean: 0.5, amplitude: 0.2, period: 1.0, phase: 0.0 },
    });
    let mut cfg = scenario(
        "stefan-bistable",
        field,
        MovingDomain::fixed(-1.0, 1.0),
        BoundaryPair::both(BoundaryCondition::FreeStefan { mu: 1.0 }),
        "0.4*(1 - x^2)*(1 + 0.6*x)",
    );
    cfg.grid.nodes = 201;
    cfg.time = TimeSettings::new(5.0, 1e-3);
    cfg.time.output_every = 10;
    cfg.time.period = Some(1.0);
    cfg
}

/// Half line with a periodic nonlinear flux at `x = 0` and a periodic
/// logistic reaction that turns negative for `x > 2`, truncated at `x = 12`.
pub fn periodic_half_line() -> ScenarioConfig {
    let field = CoefficientField::heat().with_reaction(Reaction::Expr(expr("(2 - x + 0.5*sin(2*pi*t))*u*(1 - u)")));
    let flux = FluxLaw::Polynomial {
        beta: TimeFunction::Periodic { mean: 0.5, amplitude: 0.3, period: 1.0, phase: 0.0 },
        cubic: 0.1,
    };
    let mut domain = MovingDomain::fixed(0.0, 12.0);
    domain.half_line = true;
    let mut cfg = scenario(
        "periodic-half-line",
        field,
        domain,
        BoundaryPair::new(BoundaryCondition::NonlinearFlux { law: flux, h4: true }, BoundaryCondition::DirichletZero),
        "max(0, 1 - x)^2*0.8",
    );
    cfg.grid.nodes = 601;
    cfg.time = TimeSettings::new(16.0, 5e-3);
    cfg.time.output_every = 4;
    cfg.time.period = Some(1.0);
    cfg.h4_bound = true;
    cfg
}

/// Amplitude and period of the oscillating interval of [`moving_heat`].
pub const MOVING_AMPLITUDE: f64 = 0.2;
pub const MOVING_PERIOD: f64 = 0.5;

/// Heat equation on `[s(t), 1 + s(t)]`, `s(t) = A sin(2πt/P)`, with drift
/// `b = -s'(t)`: in the co-moving variable `x - s(t)` this is the plain heat
/// equation on `[0, 1]`.
pub fn moving_heat(nodes: usize, dt: f64) -> ScenarioConfig {
    let (a, p) = (MOVING_AMPLITUDE, MOVING_PERIOD);
    let shift = |mean: f64| TimeFunction::Periodic { mean, amplitude: a, period: p, phase: 0.0 };
    let mut field = CoefficientField::heat();
    // -s'(t) = -(2πA/P) cos(2πt/P) = (2πA/P) sin(2πt/P - π/2)
    field.b = Coefficient::Periodic {
        mean: 0.0,
        amplitude: 2.0 * std::f64::consts::PI * a / p,
        period: p,
        phase: -std::f64::consts::FRAC_PI_2,
    };
    let mut cfg = scenario(
        "moving-heat",
        field,
        MovingDomain::new(shift(0.0), shift(1.0)),
        BoundaryPair::both(BoundaryCondition::DirichletZero),
        "sin(pi*x) + 0.5*sin(3*pi*x)",
    );
    cfg.grid.nodes = nodes;
    cfg.time = TimeSettings::new(0.1, dt);
    cfg
}

/// Stream-separated generator so scenario `index` does not depend on how
/// many others were drawn.
fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Interior sign changes of `f` on 2001 points of `[x0, x1]`.
fn sign_changes(f: &Expr, x0: f64, x1: f64) -> usize {
    let vals: Vec<f64> = (0..=2000).map(|k| f.eval(x0 + (x1 - x0) * k as f64 / 2000.0, 0.0, 0.0)).collect();
    vals.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
}

/// Cosine polynomial `Σ c_k cos(kπ(x - x0)/L + φ_k)` with 1 to 6 interior
/// sign changes; `phases` false keeps `u_x(x0) = 0`.
fn trig_profile(rng: &mut ChaCha8Rng, x0: f64, len: f64, phases: bool) -> Expr {
    loop {
        let k_max = rng.gen_range(2..=6);
        let mut s = format!("{:.6}", rng.gen_range(-0.5..0.5));
        for k in 1..=k_max {
            let c: f64 = rng.gen_range(-1.0..1.0);
            let phi = if phases { rng.gen_range(0.0..std::f64::consts::TAU) } else { 0.0 };
            s.push_str(&format!(" + {c:.6}*cos({k}*pi*(x - {x0})/{len} + {phi:.6})"));
        }
        let e = expr(&s);
        if (1..=6).contains(&sign_changes(&e, x0, x0 + len)) {
            return e;
        }
    }
}

fn trig(rng: &mut ChaCha8Rng, mean: (f64, f64), amp: f64) -> Coefficient {
    Coefficient::Trig {
        mean: rng.gen_range(mean.0..mean.1),
        terms: vec![TrigTerm {
            amplitude: rng.gen_range(-amp..amp),
            wave_x: rng.gen_range(0.5..3.0),
            freq_t: rng.gen_range(0.0..5.0),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }],
    }
}

fn random_side(rng: &mut ChaCha8Rng) -> BoundaryCondition {
    match rng.gen_range(0..3) {
        0 => BoundaryCondition::DirichletZero,
        1 => BoundaryCondition::Neumann,
        _ => BoundaryCondition::robin(rng.gen_range(0.2..3.0)),
    }
}

/// Linear equation on `[0, 1]` with `a ∈ [0.5, 2]`, bounded `b`, `c`, a
/// random mix of Dirichlet, Neumann and Robin ends and trigonometric initial
/// data with 1 to 6 sign changes.
pub fn random_linear(seed: u64, index: u64) -> ScenarioConfig {
    let mut rng = rng_for(seed, index);
    let mut field = CoefficientField::heat();
    field.a = trig(&mut rng, (0.8, 1.5), 0.3);
    field.b = trig(&mut rng, (-1.0, 1.0), 0.5);
    field.c = trig(&mut rng, (-2.0, 2.0), 1.0);
    let bcs = BoundaryPair::new(random_side(&mut rng), random_side(&mut rng));
    let u0 = trig_profile(&mut rng, 0.0, 1.0, true);
    let mut cfg = ScenarioConfig::new(&format!("linear-{index}"), field, MovingDomain::fixed(0.0, 1.0), bcs, Profile::Expr(u0));
    cfg.grid.nodes = 401;
    cfg.time = TimeSettings::new(0.2, 2.5e-4);
    cfg.time.output_every = 2;
    cfg
}

/// Radially symmetric problem in the ball of radius `R ∈ [0.5, 2]` in three
/// dimensions, Neumann at the center and Robin at `r = R`.
pub fn random_radial(seed: u64, index: u64) -> ScenarioConfig {
    let mut rng = rng_for(seed ^ 0x5241_4449_414c, index);
    let radius = rng.gen_range(0.5..2.0);
    let mut field = CoefficientField::heat();
    field.a = Coefficient::Constant(rng.gen_range(0.5..2.0));
    field.b = Coefficient::Radial { dim: 3 };
    field.c = Coefficient::Constant(rng.gen_range(-2.0..2.0));
    let bcs = BoundaryPair::new(BoundaryCondition::Neumann, BoundaryCondition::robin(rng.gen_range(0.2..3.0)));
    let u0 = trig_profile(&mut rng, 0.0, radius, false);
    let mut cfg = ScenarioConfig::new(&format!("radial-{index}"), field, MovingDomain::fixed(0.0, radius), bcs, Profile::Expr(u0));
    cfg.grid.nodes = 401;
    cfg.time = TimeSettings::new(0.2, 2.5e-4);
    cfg.time.output_every = 2;
    cfg
}

/// Names accepted by [`builtin`].
pub const BUILTINS: [&str; 8] = [
    "two-mode-heat",
    "interior-merge",
    "robin-basic",
    "stefan-conservation",
    "stefan-bistable",
    "periodic-half-line",
    "moving-heat",
    "radial-robin",
];

pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    Some(match name {
        "two-mode-heat" => two_mode_heat(),
        "interior-merge" => interior_merge(),
        "robin-basic" => robin_touch(0.05, 1.0),
        "stefan-conservation" => stefan_conservation(201, 2e-3, 1.0),
        "stefan-bistable" => stefan_bistable(),
        "periodic-half-line" => periodic_half_line(),
        "moving-heat" => moving_heat(401, 1e-4),
        "radial-robin" => random_radial(0, 0),
        _ => return None,
    })
}
