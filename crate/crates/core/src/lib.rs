//! Equilibrium bidding and revenue under profit-sharing contracts.
//!
//! Buyers with affiliated signals compete in second price or English
//! auctions. The winner pays the auction price and then hands a share of the
//! realized profit to the seller according to a sharing contract. The crate
//! solves for symmetric equilibrium bids, simulates auctions, and compares
//! seller revenue across contracts, including the case where the winner's
//! hidden effort responds to the contract.

// `!(a < b)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auctions;
pub mod contracts;
pub mod equilibrium;
pub mod error;
pub mod info_model;
pub mod numerics;
pub mod preferences;
pub mod principal_agent;

pub use auctions::{
    compare_arms_paired, compare_contracts_paired, english_payment_direct, estimate_revenue,
    revenue_closed_form_example1, run_english_clock, run_second_price, Arm, AuctionFormat,
    AuctionOutcome, PairedReport, RevenueBreakdown,
};
pub use contracts::{check_admissible, AdmissibilityReport, PiecewiseLinear, SharingContract};
pub use equilibrium::{
    bid_eng, bid_general_sp, bid_plsc_sp, bid_posc_sp, bid_sp, english_strategy,
    equilibrium_strategy_sp, invert_drop_prices, BidFunction,
};
pub use error::{Error, Result};
pub use info_model::{
    BuiltinModel, InfoModel, ModelKind, OracleKind, OrderStats, SignalProfile, ValueLaw,
};
pub use numerics::RandomStream;
pub use preferences::{verify_utility, Utility};
pub use principal_agent::{CostFunction, PaContract};
