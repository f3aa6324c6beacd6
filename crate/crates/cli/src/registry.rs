//! Library operations and the verb and config that reach each of them.

/// One library operation exposed through the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Operation {
    pub module: &'static str,
    pub name: &'static str,
    pub verb: &'static str,
    /// Name of an entry of [`EXAMPLES`] whose run calls the operation.
    pub example: &'static str,
}

const fn op(module: &'static str, name: &'static str, verb: &'static str, example: &'static str) -> Operation {
    Operation {
        module,
        name,
        verb,
        example,
    }
}

pub const OPERATIONS: &[Operation] = &[
    op("nets", "make_delta", "spectrum", "spectrum"),
    op("nets", "embed_classical", "spectrum", "support"),
    op("nets", "net_algebra", "spectrum", "support"),
    op("nets", "seminorm", "classify", "classify"),
    op("nets", "restrict", "spectrum", "convergence"),
    op("asymptotics", "fit_valuation", "classify", "fit"),
    op("asymptotics", "is_moderate", "classify", "classify"),
    op("asymptotics", "is_negligible", "classify", "classify"),
    op("asymptotics", "classify", "classify", "classify"),
    op("local_spectrum", "test_convergence", "spectrum", "convergence"),
    op("local_spectrum", "critical_exponent", "experiment", "delta_powers"),
    op("local_spectrum", "singular_support", "spectrum", "support"),
    op("local_spectrum", "singular_spectrum", "spectrum", "spectrum"),
    op("local_spectrum", "check_nonlinear_bounds", "spectrum", "product"),
    op("frequential", "windowed_fourier", "wavefront", "cones"),
    op("frequential", "cone_decay_classify", "wavefront", "cones"),
    op("frequential", "wavefront_estimate", "wavefront", "wavefront"),
    op("frequential", "rRL_microlocal_test", "wavefront", "rrl"),
    op("experiments", "solve_transport", "experiment", "transport"),
    op("experiments", "solve_blowup", "experiment", "blowup"),
    op("experiments", "strength_of_singularity", "experiment", "strength"),
    op("experiments", "solve_rauch_reed", "experiment", "sum_law"),
    op("experiments", "run_delta_powers", "experiment", "delta_powers"),
    op("cli", "parse_config", "spectrum", "spectrum"),
    op("cli", "run", "spectrum", "spectrum"),
];

/// Small configs exercising every operation on a nine-rung ladder.
pub const EXAMPLES: &[(&str, &str)] = &[
    (
        "spectrum",
        "net = \"delta:m=2\"\n[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"spectrum\"\ngrid = [0.0]\n",
    ),
    (
        "support",
        "net = \"kink:pow=2\"\n[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"support\"\ngrid = [0.0, 0.5]\n",
    ),
    (
        "convergence",
        "[net]\nkind = \"restrict\"\nlo = -0.5\nhi = 0.5\nbase = { kind = \"heaviside\" }\n[ladder]\neps0 = 0.0078125\ncount = 9\n\
         [analysis]\nkind = \"convergence\"\nr = 0.0\nlo = 0.2\nhi = 0.4\n",
    ),
    (
        "product",
        "net = \"delta\"\n[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"product\"\nother = \"heaviside\"\ngrid = [0.0]\n",
    ),
    (
        "classify",
        "net = \"heaviside\"\n[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"classify\"\nk = [-0.5, 0.5]\nl_max = 1\n",
    ),
    (
        "fit",
        "[analysis]\nkind = \"fit\"\nsamples = [[0.5, 2.0], [0.25, 4.0], [0.125, 8.0], [0.0625, 16.0]]\ntail = 4\n",
    ),
    (
        "cones",
        "net = \"delta\"\n[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"cones\"\nx0 = 0.0\nq_max = 2\n",
    ),
    (
        "wavefront",
        "net = \"delta\"\n[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"wavefront\"\ngrid = [0.0]\nq_max = 2\n",
    ),
    (
        "rrl",
        "net = \"delta\"\n[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"rrl\"\nx0 = 0.0\nk_max = 2\n",
    ),
    (
        "delta_powers",
        "[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"experiment\"\nname = \"delta_powers\"\nm_list = [1]\ntopologies = [\"C0\"]\n",
    ),
    (
        "transport",
        "[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"experiment\"\nname = \"transport\"\nnonlinearity = \"log_growth\"\n\
         data = \"delta:m=1\"\nt_max = 0.5\ngrid = { x = [0.0], t = [0.5] }\n",
    ),
    (
        "blowup",
        "[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"experiment\"\nname = \"blowup\"\ngrid = { x = [0.0], t = [0.5] }\n",
    ),
    (
        "strength",
        "[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"experiment\"\nname = \"strength\"\nnets = [\"heaviside\"]\n",
    ),
    (
        "sum_law",
        "[ladder]\neps0 = 0.0078125\ncount = 9\n[analysis]\nkind = \"experiment\"\nname = \"sum_law\"\n\
         pairs = [[\"ddelta:k=0\", \"ddelta:k=0\"]]\n",
    ),
];

pub fn example(name: &str) -> Option<&'static str> {
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|e| e.1)
}
