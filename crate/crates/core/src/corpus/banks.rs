//! Default phrase banks for the synthetic corpus.
//!
//! Slots: `{entity}` takes a surface form of the entity type the template
//! needs, `{years}` a small number, `{country}`, `{city}` and `{dept}` come
//! from the filler lists at the bottom.

use crate::corpus::TemplateId;
use crate::textproc::EntityType;

pub const WORK_AUTH: &[&str] = &[
    "must be authorized to work in the {country}",
    "candidates must be legally eligible to work in the {country}",
    "applicants must have valid work authorization",
    "you must be legally authorized to work in the {country} without restriction",
    "proof of eligibility to work in the {country} is required",
    "must have the legal right to work in the {country}",
    "only candidates authorized to work in the {country} will be considered",
    "you must provide documents showing your right to work in the {country}",
];

pub const SPONSORSHIP: &[&str] = &[
    "we are unable to sponsor work visas",
    "this position is not eligible for visa sponsorship",
    "the company will not sponsor applicants for employment visas",
    "candidates who require visa sponsorship now or in the future will not be considered",
    "we cannot provide h1b sponsorship for this role",
    "no visa sponsorship is available for this position",
    "employer sponsorship of work permits is not possible",
    "we do not offer immigration sponsorship",
];

pub const EDUCATION: &[&str] = &[
    "{entity} required",
    "a {entity} in a related field is required",
    "must hold a {entity} or equivalent",
    "{entity} in computer science, engineering, or a related discipline",
    "minimum education: {entity}",
    "candidates should have completed a {entity}",
    "a {entity} from an accredited institution",
    "you hold a {entity} in business or finance",
];

pub const LANGUAGE: &[&str] = &[
    "fluency in {entity} is required",
    "must be able to speak {entity} fluently",
    "strong verbal and written {entity} skills",
    "native or professional proficiency in {entity}",
    "ability to communicate in {entity} with customers",
    "you speak {entity} at a business level",
    "conversational {entity} needed to support our clients",
];

pub const CREDENTIAL: &[&str] = &[
    "must hold an active {entity}",
    "{entity} required",
    "a current {entity} is required",
    "candidates must obtain {entity} within 90 days of hire",
    "valid {entity} preferred",
    "you hold a current {entity} in good standing",
    "possession of {entity} is expected",
];

pub const TOOLS: &[&str] = &[
    "{years}+ years of experience with {entity}",
    "strong proficiency in {entity}",
    "hands-on experience using {entity}",
    "working knowledge of {entity} is a must",
    "experience building applications with {entity}",
    "expert level {entity} skills",
    "{years} years of professional {entity} development",
    "you have shipped production code using {entity}",
];

pub const NULL_SENTENCES: &[&str] = &[
    "we offer competitive salary and benefits",
    "join our fast growing team in {city}",
    "our company values diversity and inclusion",
    "flexible working hours and remote options",
    "we are an equal opportunity employer",
    "you will collaborate with cross functional teams",
    "responsibilities include managing daily operations",
    "the role reports to the head of {dept}",
    "generous paid time off and parental leave",
    "about us: we build products used by millions",
    "apply today to join our mission",
    "health, dental, and vision insurance",
    "our office in {city} has free parking",
    "you will mentor junior members of the {dept} team",
    "we celebrate wins together as a team",
    "the {dept} group is growing quickly",
    "we believe in continuous learning and growth",
    "this is a full time position based in {city}",
    "you will own projects from start to finish",
    "our customers rely on us every day",
];

/// Non-entity contexts for ambiguous surface forms, per entity type. The
/// slot is filled with single-token surface forms only.
pub fn mention_distractors(t: EntityType) -> &'static [&'static str] {
    match t {
        EntityType::Degree => &[
            "we provide {entity} party supplies",
            "our {entity} party planning service is popular",
            "the {entity} tournament is held every spring",
            "our store sells {entity} themed gifts",
        ],
        EntityType::SpokenLanguage => &[
            "our clients include european and {entity} companies",
            "we serve {entity} food in our cafeteria",
            "the {entity} market is our largest region",
            "we partner with {entity} manufacturers",
        ],
        EntityType::ToolSkill => &[
            "the {entity} conference room is on the second floor",
            "our office mascot is named {entity}",
            "visit our office on {entity} street",
            "the team lunch is at the {entity} cafe",
        ],
        EntityType::Credential => &[
            "{entity} is the codename of our internal project",
            "the {entity} building houses our lab",
            "call the {entity} desk for visitor badges",
            "our {entity} committee meets monthly",
        ],
    }
}

/// Subjects for requirement-polarity sentences.
pub fn polarity_subjects(t: TemplateId) -> &'static [&'static str] {
    match t {
        TemplateId::Null => &[],
        TemplateId::WorkAuth => &[
            "authorization to work in the {country}",
            "legal work eligibility",
            "proof of work authorization",
        ],
        TemplateId::Sponsorship => &[
            "visa sponsorship",
            "employer visa sponsorship",
            "sponsorship for work permits",
        ],
        TemplateId::Education => &[
            "a {entity}",
            "a {entity} for this position",
            "holding a {entity}",
        ],
        TemplateId::Language => &[
            "fluency in {entity}",
            "{entity} language proficiency",
            "speaking {entity}",
        ],
        TemplateId::Credential => &[
            "an active {entity}",
            "a current {entity}",
            "holding a {entity}",
        ],
        TemplateId::Tools => &[
            "experience with {entity}",
            "prior {entity} experience",
            "knowledge of {entity}",
        ],
    }
}

/// Stance words: the first list asks the question when not negated, the
/// second one when negated.
pub fn polarity_stances(t: TemplateId) -> (&'static [&'static str], &'static [&'static str]) {
    match t {
        TemplateId::Sponsorship => (&["withheld", "excluded"], &["offered", "provided"]),
        _ => (
            &["required", "mandatory", "essential"],
            &["optional", "unnecessary"],
        ),
    }
}

pub const POLARITY_FRAMES: &[&str] = &[
    "{subject} is {neg}{stance}",
    "for this role, {subject} is {neg}{stance}",
    "please note that {subject} is {neg}{stance}",
    "{subject} will {neg}be {stance}",
];

pub const COUNTRIES: &[&str] = &[
    "us",
    "united states",
    "uk",
    "canada",
    "eu",
    "germany",
    "australia",
];
pub const CITIES: &[&str] = &[
    "seattle", "austin", "london", "toronto", "berlin", "sydney", "chicago", "denver",
];
pub const DEPTS: &[&str] = &[
    "engineering",
    "sales",
    "finance",
    "operations",
    "marketing",
    "design",
    "support",
];
pub const LEAD_INS: &[&str] = &["", "", "", "", "- ", "• ", "* "];

pub fn template_bank(t: TemplateId) -> &'static [&'static str] {
    match t {
        TemplateId::Null => NULL_SENTENCES,
        TemplateId::WorkAuth => WORK_AUTH,
        TemplateId::Sponsorship => SPONSORSHIP,
        TemplateId::Education => EDUCATION,
        TemplateId::Language => LANGUAGE,
        TemplateId::Credential => CREDENTIAL,
        TemplateId::Tools => TOOLS,
    }
}

/// Default job-side schema: feature name and its values.
pub fn default_job_schema() -> Vec<(String, Vec<String>)> {
    let f = |name: &str, values: &[&str]| {
        (
            name.to_string(),
            values.iter().map(|v| v.to_string()).collect(),
        )
    };
    vec![
        f(
            "industry",
            &[
                "software",
                "finance",
                "healthcare",
                "retail",
                "manufacturing",
                "education",
                "logistics",
                "energy",
                "media",
                "government",
                "hospitality",
                "construction",
                "legal",
                "telecom",
                "automotive",
                "nonprofit",
                "banking",
                "insurance",
                "biotech",
                "pharma",
                "hospitals",
                "e-learning",
                "higher-ed",
                "staffing",
                "consulting",
                "accounting",
                "real-estate",
                "architecture",
                "aviation",
                "airlines",
                "maritime",
                "railroad",
                "utilities",
                "oil-gas",
                "mining",
                "chemicals",
                "textiles",
                "food-production",
                "restaurants",
                "wholesale",
                "e-commerce",
                "gaming",
                "broadcast",
                "publishing",
                "defense",
                "security",
                "semiconductors",
                "farming",
            ],
        ),
        f(
            "company_size",
            &["1-10", "11-50", "51-200", "201-1000", "1001-5000", "5000+"],
        ),
        f(
            "seniority",
            &["intern", "entry", "associate", "mid", "senior", "director"],
        ),
        f(
            "function",
            &[
                "engineering",
                "sales",
                "marketing",
                "finance",
                "operations",
                "hr",
                "legal",
                "design",
                "support",
                "research",
                "it",
                "healthcare",
            ],
        ),
        f(
            "region",
            &[
                "na-west",
                "na-east",
                "latam",
                "emea-north",
                "emea-south",
                "apac",
                "anz",
                "africa",
            ],
        ),
        f(
            "employment_status",
            &["full-time", "part-time", "contract", "temporary"],
        ),
        f("experience_level", &["none", "1-2", "3-5", "6-10", "10+"]),
        f(
            "title_group",
            &[
                "software engineer",
                "data analyst",
                "nurse",
                "accountant",
                "sales representative",
                "teacher",
                "truck driver",
                "project manager",
                "designer",
                "electrician",
                "customer support",
                "lawyer",
            ],
        ),
    ]
}
