//! Linear classifiers: one-vs-one hinge-loss SVM and multinomial logistic
//! regression. Both report a probability per class for soft voting.

mod logreg;
mod svm;

pub use logreg::{train_logreg, LogRegModel, LogRegParams};
pub use svm::{
    pair_subset, pairwise_probs, train_ovo_svm, train_svm_binary, BinaryLinearModel, OvoSvmModel, SvmParams, PAIRS,
};
