//! Word pools for the synthetic corpus.

pub(super) const FIRST_NAMES: &[&str] = &[
    "Anna", "John", "Maria", "David", "Sofia", "James", "Emma", "Lucas", "Olivia", "Noah", "Priya",
    "Wei", "Fatima", "Carlos", "Hannah", "Omar", "Grace", "Daniel", "Aisha", "Leo", "Mia", "Ethan",
    "Chloe", "Samuel", "Yuki", "Ravi", "Elena", "Marco", "Nina", "Tom", "Sara", "Ben", "Julia",
    "Kevin", "Laura", "Ivan", "Zoe", "Adam", "Lily", "Hugo",
];

pub(super) const LAST_NAMES: &[&str] = &[
    "Doe", "Smith", "Garcia", "Chen", "Patel", "Kim", "Nguyen", "Lopez", "Brown", "Silva", "Rossi",
    "Novak", "Khan", "Muller", "Tanaka", "Haddad", "Walsh", "Cohen", "Okafor", "Berg",
];

/// `(profession, work topics)`
pub(super) const PROFESSIONS: &[(&str, &[&str])] = &[
    (
        "Software Developer",
        &[
            "Sprint Planning",
            "Code Review",
            "API Design",
            "LLM Discussion",
            "Release Retro",
        ],
    ),
    (
        "Nurse",
        &[
            "Shift Handover",
            "Patient Safety Training",
            "Ward Rota",
            "CPR Refresher",
        ],
    ),
    (
        "Teacher",
        &[
            "Parent Conference",
            "Curriculum Review",
            "Field Trip Planning",
            "Grading Session",
        ],
    ),
    (
        "Accountant",
        &[
            "Quarterly Audit",
            "Tax Filing Review",
            "Budget Forecast",
            "Expense Report",
        ],
    ),
    (
        "Graphic Designer",
        &[
            "Brand Workshop",
            "Logo Review",
            "Client Pitch",
            "Portfolio Critique",
        ],
    ),
    (
        "Sales Manager",
        &[
            "Pipeline Review",
            "Client Demo",
            "Quarterly Targets",
            "Territory Planning",
        ],
    ),
    (
        "Chef",
        &[
            "Menu Tasting",
            "Supplier Meeting",
            "Kitchen Inspection",
            "Staff Training",
        ],
    ),
    (
        "Lawyer",
        &[
            "Case Briefing",
            "Deposition Prep",
            "Contract Review",
            "Client Consultation",
        ],
    ),
    (
        "Civil Engineer",
        &[
            "Site Inspection",
            "Design Review",
            "Safety Audit",
            "Permit Meeting",
        ],
    ),
    (
        "Marketing Specialist",
        &[
            "Campaign Launch",
            "Analytics Review",
            "Content Calendar",
            "Brand Strategy",
        ],
    ),
    (
        "Student",
        &[
            "Study Group",
            "Thesis Meeting",
            "Lab Session",
            "Exam Review",
        ],
    ),
    (
        "Pharmacist",
        &[
            "Inventory Check",
            "Vaccine Clinic",
            "Compliance Training",
            "Staff Meeting",
        ],
    ),
];

#[derive(Debug)]
pub(super) struct Hobby {
    pub name: &'static str,
    /// Title of the recurring class, e.g. "Guitar Class".
    pub class: &'static str,
    pub searches: &'static [&'static str],
    pub note: &'static str,
    pub place: &'static str,
}

pub(super) const HOBBIES: &[Hobby] = &[
    Hobby {
        name: "guitar",
        class: "Guitar Class",
        searches: &[
            "guitar chords for beginners",
            "best acoustic guitar strings",
        ],
        note: "Guitar Practice Log",
        place: "Music Studio",
    },
    Hobby {
        name: "piano",
        class: "Piano Lesson",
        searches: &["easy piano songs", "piano scales practice"],
        note: "Piano Repertoire",
        place: "Music Studio",
    },
    Hobby {
        name: "yoga",
        class: "Yoga Class",
        searches: &["yoga poses for back pain", "hot yoga benefits"],
        note: "Yoga Routine",
        place: "Yoga Studio",
    },
    Hobby {
        name: "swimming",
        class: "Swimming Lesson",
        searches: &["freestyle swimming technique", "public pool opening hours"],
        note: "Swim Training Plan",
        place: "Community Pool",
    },
    Hobby {
        name: "cooking",
        class: "Cooking Class",
        searches: &["knife skills tutorial", "sourdough starter guide"],
        note: "Recipe Ideas",
        place: "Culinary School",
    },
    Hobby {
        name: "reading",
        class: "Book Club",
        searches: &["best mystery novels", "award winning fiction"],
        note: "Reading List",
        place: "City Library",
    },
    Hobby {
        name: "photography",
        class: "Photography Workshop",
        searches: &["camera aperture settings", "golden hour photography tips"],
        note: "Photo Shoot Ideas",
        place: "Art Center",
    },
    Hobby {
        name: "painting",
        class: "Painting Class",
        searches: &["watercolor painting techniques", "acrylic paint sets"],
        note: "Painting Supplies List",
        place: "Art Center",
    },
    Hobby {
        name: "hiking",
        class: "Hiking Trip",
        searches: &["hiking trails nearby", "waterproof hiking boots"],
        note: "Hiking Gear Checklist",
        place: "Trailhead Parking",
    },
    Hobby {
        name: "tennis",
        class: "Tennis Practice",
        searches: &["tennis serve drills", "tennis racket reviews"],
        note: "Tennis Drills",
        place: "Tennis Club",
    },
    Hobby {
        name: "running",
        class: "Running Club",
        searches: &["marathon training schedule", "running shoes for flat feet"],
        note: "Marathon Training Plan",
        place: "City Park",
    },
    Hobby {
        name: "chess",
        class: "Chess Club",
        searches: &["chess opening traps", "chess endgame puzzles"],
        note: "Chess Openings",
        place: "Community Center",
    },
    Hobby {
        name: "gardening",
        class: "Gardening Workshop",
        searches: &["when to plant tomatoes", "composting at home"],
        note: "Garden Planting Plan",
        place: "Botanical Garden",
    },
    Hobby {
        name: "baking",
        class: "Baking Class",
        searches: &["croissant recipe tips", "gluten free bread baking"],
        note: "Baking Experiments",
        place: "Culinary School",
    },
    Hobby {
        name: "cycling",
        class: "Cycling Group Ride",
        searches: &["road bike maintenance", "cycling routes nearby"],
        note: "Cycling Log",
        place: "Bike Shop",
    },
    Hobby {
        name: "dancing",
        class: "Salsa Class",
        searches: &["salsa basic steps", "dance shoes for beginners"],
        note: "Dance Moves",
        place: "Dance Studio",
    },
    Hobby {
        name: "pottery",
        class: "Pottery Class",
        searches: &["pottery wheel for beginners", "glaze firing temperatures"],
        note: "Pottery Glaze Notes",
        place: "Art Center",
    },
    Hobby {
        name: "knitting",
        class: "Knitting Circle",
        searches: &["knitting patterns for scarves", "merino yarn brands"],
        note: "Knitting Projects",
        place: "Yarn Shop",
    },
];

pub(super) const GENRES: &[&str] = &[
    "Pop",
    "Rock",
    "Jazz",
    "Classical",
    "Hip Hop",
    "Country",
    "Electronic",
    "R&B",
    "Indie",
    "Latin",
];

pub(super) const ARTIST_FIRST: &[&str] = &[
    "Luna", "Echo", "Velvet", "Neon", "Silver", "Crimson", "Golden", "Midnight", "Paper", "Wild",
    "Ocean", "Static", "Amber", "Cobalt",
];
pub(super) const ARTIST_SECOND: &[&str] = &[
    "Rivers", "Foxes", "Harbor", "Lights", "Parade", "Kings", "Atlas", "Pilots", "Tigers",
    "Avenue", "Mirrors", "Bloom",
];

pub(super) const SONG_WORDS_A: &[&str] = &[
    "Electric", "Falling", "Summer", "Broken", "Endless", "Lonely", "Burning", "Quiet", "Dancing",
    "Shining", "Frozen", "Restless", "Hidden", "Sweet",
];
pub(super) const SONG_WORDS_B: &[&str] = &[
    "Heart",
    "Skies",
    "Highway",
    "Dreams",
    "Rain",
    "Fire",
    "Echoes",
    "Horizon",
    "Shadows",
    "Waves",
    "Stars",
    "Letters",
    "Roads",
    "Satellite",
];

pub(super) const MOVIE_GENRES: &[&str] = &[
    "Romance",
    "Comedy",
    "Thriller",
    "Science Fiction",
    "Documentary",
    "Drama",
    "Animation",
];

/// `(cuisine, dishes)`
pub(super) const CUISINES: &[(&str, &[&str])] = &[
    (
        "Italian",
        &[
            "Spaghetti Carbonara",
            "Mushroom Risotto",
            "Margherita Pizza",
        ],
    ),
    ("Mexican", &["Chicken Enchiladas", "Fish Tacos", "Pozole"]),
    (
        "Japanese",
        &["Tonkotsu Ramen", "Teriyaki Salmon", "Okonomiyaki"],
    ),
    (
        "Indian",
        &["Butter Chicken", "Chana Masala", "Palak Paneer"],
    ),
    ("Thai", &["Pad Thai", "Green Curry", "Tom Yum Soup"]),
    ("French", &["Ratatouille", "Coq au Vin", "Quiche Lorraine"]),
    ("Greek", &["Moussaka", "Spanakopita", "Souvlaki"]),
    (
        "Chinese",
        &["Kung Pao Chicken", "Pork Dumplings", "Mapo Tofu"],
    ),
];

pub(super) const SPORTS: &[&str] = &[
    "Tennis",
    "Basketball",
    "Soccer",
    "Baseball",
    "Hockey",
    "Volleyball",
    "Cricket",
];

pub(super) const CITIES: &[&str] = &[
    "Seattle",
    "Austin",
    "Boston",
    "Denver",
    "Chicago",
    "Portland",
    "San Diego",
    "Atlanta",
    "Toronto",
    "Miami",
    "Lisbon",
    "Kyoto",
];

pub(super) const RESTAURANTS: &[&str] = &[
    "Bella Vista",
    "The Green Fork",
    "Sakura House",
    "Casa Lupita",
    "Blue Harbor Grill",
    "Spice Route",
    "Le Petit Bistro",
    "Olive Tree Taverna",
];

/// `(appointment, location)`
pub(super) const APPOINTMENTS: &[(&str, &str)] = &[
    ("Dentist Appointment", "Bright Smile Dental"),
    ("Eye Doctor Appointment", "Vision Care Clinic"),
    ("Physiotherapy Session", "Active Health Clinic"),
    ("Haircut Appointment", "Downtown Barber"),
    ("Annual Checkup", "Family Medical Center"),
    ("Car Service Appointment", "Main Street Auto"),
];

pub(super) const BILLS: &[&str] = &[
    "Electricity",
    "Water",
    "Internet",
    "Phone",
    "Credit Card",
    "Gas",
    "Insurance",
];

pub(super) const PICKUPS: &[&str] = &[
    "Dry Cleaning",
    "Prescription",
    "Package",
    "Concert Tickets",
    "Repaired Laptop",
    "Birthday Cake",
];

pub(super) const GROCERIES: &[&str] = &[
    "Milk",
    "Eggs",
    "Coffee Beans",
    "Avocados",
    "Dog Food",
    "Olive Oil",
    "Fresh Basil",
    "Oat Milk",
];

/// `(store, product)`
pub(super) const ORDERS: &[(&str, &str)] = &[
    ("Amazon", "Wireless Headphones"),
    ("Target", "Desk Lamp"),
    ("REI", "Hiking Backpack"),
    ("Best Buy", "Laptop Charger"),
    ("IKEA", "Bookshelf"),
    ("Etsy", "Handmade Mug"),
    ("Nike", "Running Shoes"),
];

pub(super) const DIETS: &[&str] = &[
    "Intermittent Fasting Plan",
    "Keto Diet Plan",
    "Mediterranean Diet Plan",
    "Vegan Meal Plan",
    "High Protein Meal Plan",
];

pub(super) const WEEKDAYS: &[&str] = &[
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
    "Sunday",
];
