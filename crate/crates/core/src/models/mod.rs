//! Simulators and closed-form laws of the implemented processes.

pub mod dist;
pub mod geometric;
pub mod iid_block;
pub mod lindley;
pub mod prescribed;
pub mod reflected;

use crate::cycle::CycleWalker;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::profile::PhantomProfile;
use crate::rng::RngStream;

use self::geometric::GeometricWalker;
use self::iid_block::IidBlockWalker;
use self::lindley::LindleyWalker;
use self::prescribed::{PrescribedChain, PrescribedWalker};
use self::reflected::ReflectedWalker;

/// Step simulator for any [`ModelSpec`].
#[derive(Debug, Clone)]
pub enum Walker {
    Geometric(GeometricWalker),
    Reflected(ReflectedWalker),
    Lindley(LindleyWalker),
    Prescribed(PrescribedWalker),
    IidBlock(IidBlockWalker),
}

impl Walker {
    /// # Panics
    /// If the prescribed-β parameters do not validate.
    pub fn new(model: &ModelSpec) -> Self {
        match model {
            ModelSpec::GeometricJump { p } => Walker::Geometric(GeometricWalker::new(*p)),
            ModelSpec::ReflectedWalk { p } => Walker::Reflected(ReflectedWalker::new(*p)),
            ModelSpec::Lindley { step } => Walker::Lindley(LindleyWalker::new(*step)),
            ModelSpec::PrescribedBeta { beta, tail, m_rule } => {
                let chain = PrescribedChain::new(beta, *tail, *m_rule)
                    .expect("prescribed-beta parameters were validated");
                Walker::Prescribed(PrescribedWalker::new(chain))
            }
            ModelSpec::IidBlock { cluster_law } => {
                Walker::IidBlock(IidBlockWalker::new(cluster_law.clone()))
            }
        }
    }
}

impl CycleWalker for Walker {
    #[inline]
    fn begin_cycle(&mut self, rng: &mut RngStream) -> f64 {
        match self {
            Walker::Geometric(w) => w.begin_cycle(rng),
            Walker::Reflected(w) => w.begin_cycle(rng),
            Walker::Lindley(w) => w.begin_cycle(rng),
            Walker::Prescribed(w) => w.begin_cycle(rng),
            Walker::IidBlock(w) => w.begin_cycle(rng),
        }
    }

    #[inline]
    fn advance(&mut self, rng: &mut RngStream) -> Option<f64> {
        match self {
            Walker::Geometric(w) => w.advance(rng),
            Walker::Reflected(w) => w.advance(rng),
            Walker::Lindley(w) => w.advance(rng),
            Walker::Prescribed(w) => w.advance(rng),
            Walker::IidBlock(w) => w.advance(rng),
        }
    }
}

/// Exact profile of `model`. The Lindley law of `ζ` has no closed form;
/// use [`lindley::lindley_profile`] or an estimate instead.
pub fn closed_form_profile(model: &ModelSpec) -> Result<PhantomProfile> {
    model.validate()?;
    match model {
        ModelSpec::GeometricJump { p } => geometric::geometric_jump_profile(*p),
        ModelSpec::ReflectedWalk { p } => reflected::reflected_walk_profile(*p),
        ModelSpec::Lindley { .. } => Err(Error::Unavailable(
            "closed-form cycle law of the Lindley model".into(),
        )),
        ModelSpec::PrescribedBeta { beta, tail, m_rule } => {
            prescribed::prescribed_profile(&PrescribedChain::new(beta, *tail, *m_rule)?)
        }
        ModelSpec::IidBlock { cluster_law } => iid_block::iid_block_profile(cluster_law),
    }
}

/// The distribution `F` that the cycle-maximum tail is compared with:
/// the step law for Lindley, the level law for prescribed β.
pub fn reference_tail(model: &ModelSpec) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    match model {
        ModelSpec::Lindley { step } => {
            let step = *step;
            Some(Box::new(move |x| step.tail(x)))
        }
        ModelSpec::PrescribedBeta { tail, .. } => {
            let tail = *tail;
            Some(Box::new(move |x| tail.tail(x)))
        }
        _ => None,
    }
}
