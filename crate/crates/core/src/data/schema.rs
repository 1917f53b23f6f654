//! Canonical variable schemas for the three input tables.
//!
//! The orderings here are frozen conventions: prompts render variables in
//! exactly this order, and the golden files pin the result. Loaders map
//! arbitrary source column names onto these canonical keys.

/// How a numeric variable renders in prompts: counts without decimals,
/// measured quantities with exactly two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Render {
    Integer,
    Real2,
}

#[derive(Debug, Clone, Copy)]
pub struct VarDef {
    pub key: &'static str,
    pub display: &'static str,
    pub render: Render,
}

const fn var(key: &'static str, display: &'static str, render: Render) -> VarDef {
    VarDef {
        key,
        display,
        render,
    }
}

/// Accessibility variables: road-network and transit-ridership aggregates.
/// `total_roads` and `total_road_length` share one prompt line.
pub const ACCESSIBILITY_VARS: &[VarDef] = &[
    var("road_nodes_near_listings", "Road nodes near AirBnBs", Render::Integer),
    var("total_roads", "Total number of roads in the dong", Render::Integer),
    var("total_road_length", "Total length", Render::Real2),
    var("tunnels", "Number of tunnels", Render::Integer),
    var("bridges", "Number of bridges", Render::Integer),
    var("roads_motorway", "Number of motorway roads", Render::Integer),
    var("roads_trunk", "Number of trunk roads", Render::Integer),
    var("roads_primary", "Number of primary roads", Render::Integer),
    var("roads_secondary", "Number of secondary roads", Render::Integer),
    var("roads_tertiary", "Number of tertiary roads", Render::Integer),
    var("roads_residential", "Number of residential roads", Render::Integer),
    var("roads_service", "Number of service roads", Render::Integer),
    var("bus_boarding", "Bus boarding passengers", Render::Integer),
    var("bus_alighting", "Bus alighting passengers", Render::Integer),
    var("subway_boarding", "Subway boarding passengers", Render::Integer),
    var("subway_alighting", "Subway alighting passengers", Render::Integer),
];

/// Age bands of the domestic floating-population grid.
pub const AGE_BANDS: &[&str] = &["10s", "20s", "30s", "40s", "50s", "60s", "70s"];

/// Human-flow variables: monthly-average floating population. The age/gender
/// grid renders one line per band with both genders.
pub const HUMAN_FLOW_VARS: &[VarDef] = &[
    var("hf_total", "Total Domestic Floating Population", Render::Real2),
    var("hf_10s_male", "10s Male", Render::Real2),
    var("hf_10s_female", "10s Female", Render::Real2),
    var("hf_20s_male", "20s Male", Render::Real2),
    var("hf_20s_female", "20s Female", Render::Real2),
    var("hf_30s_male", "30s Male", Render::Real2),
    var("hf_30s_female", "30s Female", Render::Real2),
    var("hf_40s_male", "40s Male", Render::Real2),
    var("hf_40s_female", "40s Female", Render::Real2),
    var("hf_50s_male", "50s Male", Render::Real2),
    var("hf_50s_female", "50s Female", Render::Real2),
    var("hf_60s_male", "60s Male", Render::Real2),
    var("hf_60s_female", "60s Female", Render::Real2),
    var("hf_70s_male", "70s Male", Render::Real2),
    var("hf_70s_female", "70s Female", Render::Real2),
    var("hf_foreign_longterm", "Long-Term Foreign Residents", Render::Real2),
    var("hf_foreign_shortterm", "Short-Term Foreign Visitors", Render::Real2),
];

#[derive(Debug, Clone, Copy)]
pub struct ListingVar {
    pub key: &'static str,
    pub display: &'static str,
}

const fn lvar(key: &'static str, display: &'static str) -> ListingVar {
    ListingVar { key, display }
}

/// Categorical listing features, in prompt order.
pub const LISTING_CATEGORICAL: &[ListingVar] = &[
    lvar("property_type", "Property Type"),
    lvar("listing_type", "Listing Type"),
    lvar("response_time", "Airbnb Response Time"),
    lvar("cancellation_policy", "Cancellation Policy"),
    lvar("checkin_time", "Check-in Time"),
    lvar("checkout_time", "Checkout Time"),
];

/// Binary listing features, in prompt order.
pub const LISTING_BINARY: &[ListingVar] = &[
    lvar("superhost", "Airbnb Superhost"),
    lvar("instantbook", "Instantbook Enabled"),
    lvar("pets_allowed", "Pets Allowed"),
    lvar("property_manager", "Integrated Property Manager"),
];

/// Numeric listing features, in prompt order.
pub const LISTING_NUMERIC: &[ListingVar] = &[
    lvar("available_days", "Available Days"),
    lvar("blocked_days", "Blocked Days"),
    lvar("bedrooms", "Bedrooms"),
    lvar("bathrooms", "Bathrooms"),
    lvar("max_guests", "Max Guests"),
    lvar("response_rate", "Response Rate"),
    lvar("minimum_stay", "Minimum Stay"),
    lvar("num_photos", "Number of Photos"),
    lvar("overall_rating", "Overall Rating"),
    lvar("num_reviews", "Number of Reviews"),
];

/// All listing CSV columns besides the three key columns.
pub const LISTING_FEATURE_COLUMNS: &[&str] = &[
    "available_days",
    "blocked_days",
    "property_type",
    "listing_type",
    "bedrooms",
    "bathrooms",
    "max_guests",
    "response_rate",
    "response_time",
    "superhost",
    "cancellation_policy",
    "checkin_time",
    "checkout_time",
    "minimum_stay",
    "num_photos",
    "instantbook",
    "pets_allowed",
    "property_manager",
    "overall_rating",
    "num_reviews",
];

pub const LABEL_COLUMNS: &[&str] = &["reservation_days", "revenue", "num_reservations"];
