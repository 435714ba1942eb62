use thiserror::Error;

/// Every failure the engine can report. Variants are grouped roughly by the
/// module that raises them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("basis mismatch: expected {expected} coefficients, got {got}")]
    BasisMismatch { expected: usize, got: usize },
    #[error("gram matrix is not square and symmetric")]
    MalformedGram,
    #[error("basis name `{0}` occurs twice")]
    NameCollision(String),
    #[error("invalid divisor list: {0}")]
    InvalidDivisorList(String),

    #[error("multiple fibres not coprime: gcd({p}, {q}) != 1")]
    MultipleFibresNotCoprime { p: i64, q: i64 },
    #[error("outside Persson sector: (x, y) = ({x}, {y})")]
    OutsidePerssonSector { x: i64, y: i64 },
    #[error("unknown catalog surface `{0}`")]
    UnknownCatalogEntry(String),
    #[error("catalog parameters rejected: {0}")]
    CatalogParameters(String),
    #[error("not almost-complex consistent: e + sigma = {0} is not divisible by 4")]
    NotAlmostComplex(i64),

    #[error("unknown surface `{0}`")]
    UnknownSurface(String),
    #[error("surface `{name}` has genus {found:?}, expected {expected}")]
    GenusMismatch { name: String, expected: u64, found: Option<u64> },
    #[error("surface `{name}` has self-intersection {value}, expected 0")]
    NonzeroSelfIntersection { name: String, value: i64 },
    #[error("surface `{0}` is not an indivisible class")]
    DivisibleClass(String),
    #[error("surface `{0}` has no dual class in the tracked lattice")]
    NoDual(String),
    #[error("knot surgery needs a torus, `{name}` has genus {genus:?}")]
    NotATorus { name: String, genus: Option<u64> },
    #[error("generalized knot surgery needs genus > 1 (got {0}); use knot_surgery")]
    UseKnotSurgery(u64),
    #[error("precondition failed in {op}: {reason}")]
    Precondition { op: &'static str, reason: String },
    #[error("input is not an unsurgered elliptic surface E(n)")]
    NotElliptic,
    #[error("undeclared or already used Lagrangian triple {0}")]
    UndeclaredTriple(u32),

    #[error("inconsistent branch data: {0}")]
    InconsistentBranchData(String),
    #[error("pluricanonical system not known to define map (n = {n})")]
    PluriNotKnown { n: i64 },
    #[error("cover degree m = {m} does not satisfy (m-1) | (d-1) for d = {d}")]
    CoverDivisibility { m: i64, d: i64 },
    #[error("the point (e, c1^2) = (129, 27) is excluded for d = 3, m = 3")]
    ExceptionalPoint,

    #[error("spin parity obstruction: n = {n} is odd but d = {d} is even")]
    SpinParityObstruction { n: i64, d: i64 },

    #[error("recipe parse error at line {line}, column {column}: {message}")]
    RecipeParse { line: usize, column: usize, message: String },
    #[error("recipe error: {0}")]
    Recipe(String),
    #[error("recipe nesting exceeds depth {0}")]
    RecipeTooDeep(usize),
    #[error("cyclic recipe reference through `{0}`")]
    RecipeCycle(String),
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
