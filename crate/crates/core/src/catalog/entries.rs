use super::{EntrySpec, ParamSpec, ReconSpec, SolutionSpec};

const BURGERS: &str = "u_t + u*u_x - u_xx";
const HS: &str = "u_tx + u*u_xx + u_x^2/2";
const BURGERS_H: [[&str; 3]; 3] = [["1", "0", "0"], ["0", "1", "0"], ["0", "t", "1"]];
const BURGERS_REST: [[&str; 3]; 2] = [["2*t", "x", "-u"], ["t^2", "t*x", "x - t*u"]];
const Y_F: [[&str; 3]; 1] = [["0", "f(t)", "f'(t)"]];
const TYPE2: [[&str; 3]; 1] = [["f(t)", "0", "-f'(t)"]];
const TYPE3: [[&str; 3]; 1] = [["f(t)", "0", "0"]];
const TYPE4: [[&str; 3]; 1] = [["0", "0", "f(t)"]];
const TYPE1_INV: [(&str, &str); 3] = [("I", "t"), ("J", "u_x"), ("H", "u_xx")];
const TYPE2_INV: [(&str, &str); 3] = [("I", "x"), ("J", "u_x"), ("H", "u_xx")];
const TYPE3_INV: [(&str, &str); 3] = [("I", "x"), ("J", "u"), ("H", "u_x")];
const TYPE4_INV: [(&str, &str); 3] = [("I", "t"), ("J", "x"), ("H", "u_x")];
const HS_QUOTIENT: &str = "2*H_I - J^2*H_J + 4*J*H";

const fn base(name: &'static str, title: &'static str, f: &'static str, principal: &'static str) -> EntrySpec {
    EntrySpec {
        name,
        title,
        f,
        principal,
        gens: &[],
        extra_symmetries: &[],
        invariants: &[],
        syzygies: &[],
        solution: None,
        reconstructions: &[],
        substitution: None,
        params: &[],
        functions: &[],
        notes: "",
    }
}

pub static ENTRIES: &[EntrySpec] = &[
    EntrySpec {
        gens: &BURGERS_H,
        extra_symmetries: &BURGERS_REST,
        invariants: &[("I", "u_x"), ("J", "u_xx"), ("H", "u_xxx"), ("K", "u_xxxx")],
        syzygies: &[
            "(I^2*H - 3*I*J^2 + J*K - H^2)*H_I + J*H*K_I + H^2*K_J - K^2 + 3*I*J*K - 4*I*H^2 - 3*J^2*H",
            "J*H_I + H*H_J - K",
            "J^2*H_II + 2*J*H*H_IJ + H^2*H_JJ + I^2*H_I + 3*I*J*H_J - 4*I*H - 3*J^2",
        ],
        notes: "two first-order syzygies; K is generated by I, J, H",
        ..base("burgers-h3", "Burgers equation, translations and Galilean boosts", BURGERS, "u_t")
    },
    EntrySpec {
        gens: &[
            ["1", "0", "0"],
            ["0", "1", "0"],
            ["0", "t", "1"],
            ["2*t", "x", "-u"],
            ["t^2", "t*x", "x - t*u"],
        ],
        invariants: &[
            ("I", "u_xxx^3/u_xx^4"),
            ("J", "u_xxx*u_xxxx/u_xx^3"),
            ("H", "u_xxxxx/u_xx^2"),
            ("K", "u_xxx^2*u_xxxxxx/u_xx^5"),
        ],
        syzygies: &[
            "K + I*(4*I - 3*J)*H_I + ((3*J - H)*I - J^2)*H_J - 2*I*H",
            "I^2*(4*I - 3*J)^2*H_II + 2*I*(4*I - 3*J)*((3*J - H)*I - J^2)*H_IJ + ((3*J - H)*I - J^2)^2*H_JJ \
             + I*((9 - 2*I)*I + 6*(I - J)^2)*H_I - I*((2*(I - J))*H - 10*I + J*(2*J - 3))*H_J + 2*(H - 5)*I^2 - 15*I*J",
        ],
        notes: "one second-order syzygy",
        ..base("burgers-full", "Burgers equation, full five-dimensional symmetry algebra", BURGERS, "u_t")
    },
    EntrySpec {
        gens: &[["0", "1", "0"], ["0", "0", "1"]],
        invariants: &[("I", "u_x"), ("J", "t"), ("H", "u_xx")],
        syzygies: &["H_I - 1"],
        solution: Some(SolutionSpec::Explicit(&[("H", "I - A")])),
        reconstructions: &[ReconSpec { label: "u = Ax + B + Ce^x", u: "A*x + B + C*exp(x)", bindings: &[], general: true }],
        params: &[ParamSpec { name: "A", excluded: None }, ParamSpec { name: "B", excluded: None }, ParamSpec { name: "C", excluded: None }],
        notes: "ODE; J = t is a placeholder so the frame reduces to D_x/u_xx",
        ..base("ode-reduction", "u''' = u'' reduced by translations in x and u", "u_xxx - u_xx", "u_xxx")
    },
    EntrySpec {
        gens: &Y_F,
        extra_symmetries: &[["1", "0", "0"], ["t", "x", "0"], ["0", "x", "u"], ["t^2", "2*t*x", "2*x"]],
        invariants: &TYPE1_INV,
        syzygies: &[HS_QUOTIENT],
        solution: Some(SolutionSpec::Implicit("16*g(2*J/(2 - I*J))*H - (2 - I*J)^4")),
        reconstructions: &[
            ReconSpec {
                label: "Cauchy data u(1,x) = x^2",
                u: "(2*x*(t - 1) + 1 - ((t - 1)^3 + 3*x*(t - 1) + 1)^(2/3))/(t - 1)^2",
                bindings: &[],
                general: false,
            },
            ReconSpec {
                label: "Cauchy data u(0,x) = x^2",
                u: "(1 + 2*t*x - (t^3 + 3*t*x + 1)^(2/3))/t^2",
                bindings: &[],
                general: false,
            },
        ],
        functions: &["g", "C"],
        notes: "H_k = 1 for every k; first-order quotient",
        ..base("hunter-saxton", "Hunter-Saxton equation", HS, "u_tx")
    },
    EntrySpec {
        gens: &Y_F,
        invariants: &TYPE1_INV,
        syzygies: &["H_I - (alpha(I, J, H) - H*D(alpha,0,0,1)(I, J, H))*H_J + (J + D(alpha,0,1,0)(I, J, H))*H"],
        ..base("type1-general", "u_tx + u u_xx + alpha(t, u_x, u_xx) = 0", "u_tx + u*u_xx + alpha(t, u_x, u_xx)", "u_tx")
    },
    EntrySpec {
        gens: &Y_F,
        invariants: &TYPE1_INV,
        syzygies: &["H_I - alpha(J)*H_J + (J + alpha'(J))*H"],
        solution: Some(SolutionSpec::Explicit(&[(
            "H",
            "exp(int((v + alpha'(v))/alpha(v), v, 0, J))/g(int(1/alpha(v), v, 0, J) + I)",
        )])),
        functions: &["g"],
        ..base("ex1.1", "u_tx + u u_xx + alpha(u_x) = 0", "u_tx + u*u_xx + alpha(u_x)", "u_tx")
    },
    EntrySpec {
        gens: &Y_F,
        invariants: &TYPE1_INV,
        syzygies: &["H_I - epsilon*J^2*H_J + (1 + 2*epsilon)*J*H"],
        solution: Some(SolutionSpec::Explicit(&[("H", "J^((1 + 2*epsilon)/epsilon)/g(I - 1/(epsilon*J))")])),
        params: &[ParamSpec { name: "epsilon", excluded: Some(0) }],
        functions: &["g"],
        ..base("ex1.1-ghs", "generalized Hunter-Saxton u_tx + u u_xx + epsilon u_x^2 = 0", "u_tx + u*u_xx + epsilon*u_x^2", "u_tx")
    },
    EntrySpec {
        gens: &Y_F,
        invariants: &TYPE1_INV,
        syzygies: &["H_I + (J + D(alpha,0,1)(I, J)*H)*H"],
        solution: Some(SolutionSpec::Explicit(&[("H", "exp(-I*J)/(g(J) + int(D(alpha,0,1)(s, J)*exp(-s*J), s, 0, I))")])),
        functions: &["g"],
        ..base("ex1.2", "u_tx + u u_xx + alpha(t, u_x) u_xx = 0", "u_tx + u*u_xx + alpha(t, u_x)*u_xx", "u_tx")
    },
    EntrySpec {
        gens: &Y_F,
        invariants: &TYPE1_INV,
        syzygies: &["H_I + H^2*H_J + J*H"],
        solution: Some(SolutionSpec::Implicit("(g(J^2 + H^2) - I)*sqrt(J^2 + H^2) + atanh(J/sqrt(J^2 + H^2))")),
        functions: &["g"],
        notes: "implicit quotient solution only; no reconstruction",
        ..base("ex1.3", "u_tx + u u_xx + u_xx^2 = 0", "u_tx + u*u_xx + u_xx^2", "u_tx")
    },
    EntrySpec {
        gens: &TYPE2,
        invariants: &TYPE2_INV,
        syzygies: &["D(alpha,0,0,1)(I, J, H)*H_I + (H*D(alpha,0,0,1)(I, J, H) - alpha(I, J, H))*H_J \
                     + D(alpha,0,1,0)(I, J, H)*H + alpha(I, J, H)*J + D(alpha,1,0,0)(I, J, H)"],
        ..base("type2-general", "u_tx - alpha(x, u_x, u_xx) e^u = 0", "u_tx - alpha(x, u_x, u_xx)*exp(u)", "u_tx")
    },
    EntrySpec {
        gens: &TYPE2,
        invariants: &TYPE2_INV,
        syzygies: &["beta(I, J)*H_I + D(beta,0,1)(I, J)*H^2 + beta(I, J)*J*H + D(beta,1,0)(I, J)*H"],
        solution: Some(SolutionSpec::Explicit(&[(
            "H",
            "1/(exp(I*J)*beta(I, J)*(int(D(beta,0,1)(s, J)/(exp(s*J)*beta(s, J)^2), s, 0, I) + g(J)))",
        )])),
        functions: &["g"],
        ..base("ex2.1", "u_tx - u_xx beta(x, u_x) e^u = 0", "u_tx - u_xx*beta(x, u_x)*exp(u)", "u_tx")
    },
    EntrySpec {
        gens: &TYPE2,
        invariants: &TYPE2_INV,
        syzygies: &["-alpha(I, J)*H_J + D(alpha,0,1)(I, J)*H + alpha(I, J)*J + D(alpha,1,0)(I, J)"],
        solution: Some(SolutionSpec::Explicit(&[(
            "H",
            "(int((v*alpha(I, v) + D(alpha,1,0)(I, v))/alpha(I, v)^2, v, 0, J) + g(I))*alpha(I, J)",
        )])),
        functions: &["g"],
        ..base("ex2.2", "u_tx - alpha(x, u_x) e^u = 0", "u_tx - alpha(x, u_x)*exp(u)", "u_tx")
    },
    EntrySpec {
        gens: &TYPE2,
        invariants: &TYPE2_INV,
        syzygies: &["H_J - J"],
        solution: Some(SolutionSpec::Explicit(&[("H", "J^2/2 + g(I)")])),
        reconstructions: &[ReconSpec {
            label: "u = ln(-w_t), w = -2v_x/v, v = A(t)e^(kx) + B(t)e^(-kx), g = -2k^2",
            u: "ln(4*k*(A'(t)*B(t) - A(t)*B'(t))/(A(t)*exp(k*x) + B(t)*exp(-k*x))^2)",
            bindings: &[("g", &["x"], "-2*k^2")],
            general: true,
        }],
        substitution: Some(("-2*D(v,0,1)(t, x)/v(t, x)", "-(2*D(v,0,2)(t, x) + g(x)*v(t, x))/v(t, x)")),
        functions: &["g"],
        notes: "Riccati constraint linearized to 2v_xx + g(x)v = 0",
        ..base("ex2.3", "Liouville equation u_tx + e^u = 0", "u_tx + exp(u)", "u_tx")
    },
    EntrySpec {
        gens: &TYPE3,
        invariants: &TYPE3_INV,
        syzygies: &["H_J - alpha(I, J, H, H_I + H*H_J)"],
        ..base("type3-general", "u_tx - u_t alpha(x, u, u_x, u_xx) = 0", "u_tx - u_t*alpha(x, u, u_x, u_xx)", "u_tx")
    },
    EntrySpec {
        gens: &TYPE3,
        invariants: &TYPE3_INV,
        syzygies: &["H_J - alpha1(I, J)*H - alpha2(I, J)"],
        solution: Some(SolutionSpec::Explicit(&[(
            "H",
            "(int(alpha2(I, v)*exp(-int(alpha1(I, s), s, 0, v)), v, 0, J) + g(I))*exp(int(alpha1(I, v), v, 0, J))",
        )])),
        functions: &["g"],
        ..base("ex3.1", "u_tx - u_t (alpha1(x, u) u_x + alpha2(x, u)) = 0", "u_tx - u_t*(alpha1(x, u)*u_x + alpha2(x, u))", "u_tx")
    },
    EntrySpec {
        gens: &TYPE3,
        invariants: &TYPE3_INV,
        syzygies: &["H_J - alpha1(I)*J - alpha2(I)"],
        solution: Some(SolutionSpec::Explicit(&[("H", "alpha1(I)*J^2/2 + alpha2(I)*J + g(I)")])),
        reconstructions: &[
            ReconSpec {
                label: "Riccati, g = 0",
                u: "2*exp(int(alpha2(s), s, 0, x))/(C(t) - int(alpha1(s)*exp(int(alpha2(r), r, 0, s)), s, 0, x))",
                bindings: &[("g", &["x"], "0")],
                general: true,
            },
            ReconSpec {
                label: "linear, alpha1 = 0",
                u: "(int(g(s)*exp(-int(alpha2(r), r, 0, s)), s, 0, x) + C(t))*exp(int(alpha2(s), s, 0, x))",
                bindings: &[("alpha1", &["x"], "0")],
                general: true,
            },
        ],
        functions: &["g", "C"],
        ..base("ex3.2", "u_tx = u_t (alpha1(x) u + alpha2(x))", "u_tx - u_t*(alpha1(x)*u + alpha2(x))", "u_tx")
    },
    EntrySpec {
        gens: &TYPE3,
        invariants: &TYPE3_INV,
        syzygies: &["H_J - H"],
        solution: Some(SolutionSpec::Explicit(&[("H", "g(I)*exp(J)")])),
        reconstructions: &[ReconSpec { label: "u = ln(1/(C(t) - G(x)))", u: "ln(1/(C(t) - int(g(s), s, 0, x)))", bindings: &[], general: true }],
        functions: &["g", "C"],
        ..base("ex3.3", "u_tx = u_t u_x", "u_tx - u_t*u_x", "u_tx")
    },
    EntrySpec {
        gens: &TYPE4,
        invariants: &TYPE4_INV,
        syzygies: &["H_I - alpha(I, J, H, H_J)"],
        notes: "the quotient is the equation itself, read as a first-order PDE in u_x",
        ..base("type4-general", "u_tx = alpha(t, x, u_x, u_xx)", "u_tx - alpha(t, x, u_x, u_xx)", "u_tx")
    },
    EntrySpec {
        gens: &TYPE4,
        invariants: &TYPE4_INV,
        syzygies: &["H_I - H^A"],
        solution: Some(SolutionSpec::Explicit(&[("H", "(g(J) + (1 - A)*I)^(1/(1 - A))")])),
        reconstructions: &[ReconSpec {
            label: "u = int (g + (1-A)t)^(1/(1-A)) dx + C(t)",
            u: "int((g(s) + (1 - A)*t)^(1/(1 - A)), s, 0, x) + C(t)",
            bindings: &[],
            general: true,
        }],
        params: &[ParamSpec { name: "A", excluded: Some(1) }],
        functions: &["g", "C"],
        ..base("ex4.1", "u_tx = u_x^A", "u_tx - u_x^A", "u_tx")
    },
    EntrySpec {
        gens: &TYPE4,
        invariants: &TYPE4_INV,
        syzygies: &["H_I - H^A*H_J"],
        solution: Some(SolutionSpec::Implicit("J + I*H^A - g(H)")),
        params: &[ParamSpec { name: "A", excluded: None }],
        functions: &["g"],
        ..base("ex4.2", "u_tx = u_x^A u_xx", "u_tx - u_x^A*u_xx", "u_tx")
    },
    EntrySpec {
        gens: &TYPE4,
        invariants: &TYPE4_INV,
        syzygies: &["H_I - alpha(I, J)*H^2 - beta(I, J)*H"],
        solution: Some(SolutionSpec::Explicit(&[(
            "H",
            "exp(int(beta(s, J), s, 0, I))/(g(J) - int(alpha(s, J)*exp(int(beta(r, J), r, 0, s)), s, 0, I))",
        )])),
        reconstructions: &[ReconSpec {
            label: "u = int H(t, y) dy + C(t)",
            u: "int(exp(int(beta(s, y), s, 0, t))/(g(y) - int(alpha(s, y)*exp(int(beta(r, y), r, 0, s)), s, 0, t)), y, 0, x) + C(t)",
            bindings: &[],
            general: true,
        }],
        functions: &["g", "C"],
        ..base("ex4.3", "u_tx = alpha(t, x) u_x^2 + beta(t, x) u_x", "u_tx - alpha(t, x)*u_x^2 - beta(t, x)*u_x", "u_tx")
    },
    EntrySpec {
        gens: &[["0", "0", "f(t + x)/x"]],
        invariants: &[("I", "t"), ("J", "x"), ("H", "u + x*(u_x - u_t)")],
        syzygies: &["H_I - H^2"],
        solution: Some(SolutionSpec::Explicit(&[("H", "1/(g(J) - I)")])),
        reconstructions: &[ReconSpec {
            label: "u = (int dtau/(tau - g(x + t - tau)) + C(t + x))/x",
            u: "(int(1/(s - g(x + t - s)), s, 0, t) + C(t + x))/x",
            bindings: &[],
            general: true,
        }],
        functions: &["g", "C"],
        notes: "u_tx = u_x^2 in disguised coordinates",
        ..base(
            "disguised",
            "equation with symmetries f(t+x)/x d_u",
            "-x^2*u_t^2 + 2*x^2*u_t*u_x - x^2*u_x^2 + 2*x*u*u_t - 2*x*u*u_x - x*u_tt + x*u_tx - u^2 + u_t",
            "u_tx",
        )
    },
    EntrySpec {
        gens: &[["0", "1", "0"], ["0", "t", "1"], ["0", "t^2", "2*t"]],
        invariants: &[("I", "t"), ("J", "u_x"), ("H", "u_xx"), ("K", "u_tt - u^2*u_xx + u_t*u_x")],
        syzygies: &[HS_QUOTIENT, "K_J"],
        solution: Some(SolutionSpec::Explicit(&[("H", "(2 - I*J)^4/(16*g(2*J/(2 - I*J)))"), ("K", "C(I)")])),
        functions: &["g", "C"],
        notes: "decoupled pair of first-order syzygies",
        ..base("hs-3dim", "Hunter-Saxton equation, three-dimensional subalgebra", HS, "u_tx")
    },
    EntrySpec {
        gens: &[["1", "0", "0"], ["t", "0", "-1"], ["t^2", "0", "-2*t"]],
        invariants: &[("I", "x"), ("J", "u_x"), ("H", "u_xx"), ("K", "(2*u_tt - u_t^2)*exp(-2*u)")],
        syzygies: &["H_J - J", "K_I + H*K_J + 2*J*K"],
        solution: Some(SolutionSpec::Explicit(&[("H", "J^2/2 + g(I)")])),
        functions: &["g"],
        notes: "non-solvable symmetry algebra",
        ..base("liouville-3dim", "Liouville equation, three-dimensional subalgebra", "u_tx + exp(u)", "u_tx")
    },
];
