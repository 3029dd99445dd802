//! TFHE gate-bootstrapping backend.
//!
//! Key generation, encryption and gate evaluation are delegated to the
//! `tfhe` boolean API; every evaluated gate runs a bootstrap, so circuit
//! depth is unbounded.

use tfhe::boolean::client_key::ClientKey;
use tfhe::boolean::parameters::BooleanParameters;
use tfhe::boolean::server_key::ServerKey;

use super::ParamSet;

fn parameters(set: ParamSet) -> BooleanParameters {
    use tfhe::boolean::parameters;
    match set {
        ParamSet::Default => parameters::DEFAULT_PARAMETERS,
        ParamSet::Test => parameters::DEFAULT_PARAMETERS_KS_PBS,
        ParamSet::TfheLib => parameters::TFHE_LIB_PARAMETERS,
    }
}

pub(crate) fn keygen(set: ParamSet) -> (ClientKey, ServerKey) {
    let cks = ClientKey::new(&parameters(set));
    let sks = ServerKey::new(&cks);
    (cks, sks)
}
