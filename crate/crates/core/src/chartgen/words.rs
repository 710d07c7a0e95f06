pub(crate) const NOUNS: &[&str] = &[
    "Sales", "Revenue", "Market", "Share", "Growth", "Budget", "Income", "Exports", "Imports",
    "Energy", "Traffic", "Visitors", "Orders", "Profit", "Costs", "Demand", "Supply", "Output",
    "Rainfall", "Votes", "Students", "Members", "Downloads", "Tickets", "Harvest", "Fuel",
    "Housing", "Coffee", "Books", "Music", "Movies", "Travel", "Sports", "Games", "Water",
];

pub(crate) const CONTEXTS: &[&str] = &[
    "Store", "Region", "City", "School", "Team", "Farm", "Clinic", "Library", "Airport",
    "Museum", "Factory", "Campus", "Harbor", "Garden", "Office", "Market", "Station",
];

pub(crate) const CONNECTORS: &[&str] = &["in", "by", "of", "per", "for", "and"];

pub(crate) const YEARS: &[&str] = &[
    "2012", "2013", "2014", "2015", "2016", "2017", "2018", "2019", "2020", "2021", "2022",
];

pub(crate) const CATEGORY_SETS: &[&[&str]] = &[
    &["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"],
    &["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug"],
    &["Apples", "Pears", "Plums", "Grapes", "Mangos", "Kiwis", "Figs", "Dates"],
    &["Paris", "Tokyo", "Lima", "Cairo", "Oslo", "Delhi", "Quito", "Accra"],
    &["Rover", "Spot", "Fido", "Rex", "Buddy", "Max", "Daisy", "Bella"],
    &["Action", "Comedy", "Drama", "Horror", "Scifi", "Crime", "Romance", "Western"],
    &["North", "South", "East", "West", "Central", "Coast"],
    &["Team A", "Team B", "Team C", "Team D", "Team E", "Team F"],
    &["Q1", "Q2", "Q3", "Q4"],
    &["Wheat", "Corn", "Rice", "Oats", "Barley", "Rye", "Soy", "Millet"],
];

pub(crate) const SERIES_SETS: &[&[&str]] = &[
    &["Shirts", "Skirts", "Trousers", "Coats"],
    &["Cashews", "Walnuts", "Almonds", "Pecans"],
    &["Online", "Retail", "Export", "Direct"],
    &["Men", "Women", "Children", "Seniors"],
    &["Bus", "Train", "Car", "Bike"],
    &["Solar", "Wind", "Hydro", "Coal"],
];

pub(crate) const AXIS_UNITS: &[&str] = &["Units sold", "Count", "Amount", "Total", "Percent", "Number", "Score"];

pub(crate) const AXIS_SUFFIXES: &[&str] = &["", "", "", " (%)", " (k)", " (X 100)"];

pub(crate) const CATEGORY_AXIS_NAMES: &[&str] = &[
    "Days of the week", "Month", "Fruit", "City", "Names", "Genre", "Area", "Team", "Quarter",
    "Crop", "Year",
];
