// FutureShorelines-style coastal dashboard (legacy, synthetic stand-in)
// Single-file application: map + charts + UI wiring, global state throughout.

var accessToken = 'pk.rbnerr-mapbox-access-2031';
var styleUrl = 'mapbox://styles/rbnerr/coastal-v3';
var mapCenter = [-81.743, 26.024];
var mapZoom = 11;
var mapBounds = [[-81.952, 25.801], [-81.512, 26.221]];
var currentYear = 2030;
var currentLevel = 'interm-low';
var currentFeet = 0.54;
var selectedParcel = null;
var selectedTransect = null;
var elevationChart = null;
var slopeChart = null;
var map = null;
var distance_list = [0, 50, 100, 150, 200, 250, 300, 400, 500];
var MHHW_OFFSET = 0.88;

var parcelColors = { public: '#2e7d32', private: '#c62828', unknown: '#9e9e9e' };
var ejColorStops = [[0, '#ffffcc'], [0.25, '#a1dab4'], [0.5, '#41b6c4'], [0.75, '#2c7fb8'], [1, '#253494']];

// Scenario lookup implemented as a branch chain; every new year meant more branches.
function getFeet(year, level) {
  if (year === 2030) {
    if (level === 'interm-low') { return 0.54; }
    else if (level === 'interm') { return 0.56; }
    else if (level === 'interm-high') { return 0.60; }
    else if (level === 'high') { return 0.61; }
    else { return 0.0; }
  } else if (year === 2040) {
    if (level === 'interm-low') { return 0.85; }
    else if (level === 'interm') { return 0.98; }
    else if (level === 'interm-high') { return 1.12; }
    else if (level === 'high') { return 1.31; }
    else { return 0.0; }
  } else if (year === 2050) {
    if (level === 'interm-low') { return 1.18; }
    else if (level === 'interm') { return 1.44; }
    else if (level === 'interm-high') { return 1.75; }
    else if (level === 'high') { return 2.10; }
    else { return 0.0; }
  } else if (year === 2100) {
    if (level === 'interm-low') { return 2.08; }
    else if (level === 'interm') { return 3.63; }
    else if (level === 'interm-high') { return 5.17; }
    else if (level === 'high') { return 6.81; }
    else { return 0.0; }
  }
  return 0.0;
}

function layerIdFor(year, level) {
  if (year === 0) { return 'sl-baseline-v3'; }
  return 'sl-' + year + '-' + level + '-v3';
}

function initMap() {
  mapboxgl.accessToken = accessToken;
  map = new mapboxgl.Map({
    container: 'map',
    style: styleUrl,
    center: mapCenter,
    zoom: mapZoom,
    maxBounds: mapBounds
  });
  map.addControl(new mapboxgl.NavigationControl());
  map.addControl(new mapboxgl.ScaleControl({ unit: 'imperial' }));

  map.on('load', function () {
    map.addSource('irl', { type: 'vector', url: 'mapbox://rbnerr.irl-composite' });
    map.addSource('ej', { type: 'vector', url: 'mapbox://rbnerr.ej-screen' });
    map.addSource('dem', { type: 'raster', url: 'mapbox://rbnerr.dem-tiles' });

    map.addLayer({ id: 'parcel-outline', type: 'line', source: 'irl', 'source-layer': 'parcels' });
    map.addLayer({ id: 'parcel-highlighted', type: 'fill', source: 'irl', 'source-layer': 'parcels', filter: ['==', 'PARCEL_ID', ''] });
    map.addLayer({ id: 'transect-highlighted', type: 'line', source: 'irl', 'source-layer': 'transects', filter: ['==', 'TRANSECT_ID', ''] });
    map.addLayer({ id: 'ej-polygons1', type: 'fill', source: 'ej', 'source-layer': 'tracts' });
    map.addLayer({ id: 'ej-highlighted', type: 'line', source: 'ej', 'source-layer': 'tracts', filter: ['==', 'GEOID', ''] });
    map.addLayer({ id: 'UCF outfalls', type: 'circle', source: 'irl', 'source-layer': 'outfalls' });
    map.addLayer({ id: 'point-highlighted', type: 'circle', source: 'irl', 'source-layer': 'outfalls', filter: ['==', 'OBJECTID', ''] });

    map.on('click', 'parcel-outline', function (e) {
      selectedParcel = e.features[0].properties;
      updateParcelTable(selectedParcel);
      drawElevation(selectedParcel);
      map.setFilter('parcel-highlighted', ['==', 'PARCEL_ID', selectedParcel.PARCEL_ID]);
    });

    map.on('click', 'ej-polygons1', function (e) {
      var props = e.features[0].properties;
      updateEjTable(props.GEOID, props.DEMOGIDX_2, props.PEOPCOLORPCT);
      map.setFilter('ej-highlighted', ['==', 'GEOID', props.GEOID]);
    });

    switchScenarioLayer();
  });
}

function switchScenarioLayer() {
  var wanted = layerIdFor(currentYear, currentLevel);
  var ids = ['sl-baseline-v3'];
  var years = [2030, 2040, 2050, 2100];
  var levels = ['interm-low', 'interm', 'interm-high', 'high'];
  for (var i = 0; i < years.length; i++) {
    for (var j = 0; j < levels.length; j++) {
      ids.push(layerIdFor(years[i], levels[j]));
    }
  }
  for (var k = 0; k < ids.length; k++) {
    if (map.getLayer(ids[k])) {
      map.setLayoutProperty(ids[k], 'visibility', ids[k] === wanted ? 'visible' : 'none');
    }
  }
  var ocean = 'ocean-' + currentYear + '-' + currentLevel;
  if (map.getLayer(ocean)) {
    map.setLayoutProperty(ocean, 'visibility', 'visible');
  }
}

function drawElevation(parcel) {
  if (elevationChart == null) {
    elevationChart = echarts.init(document.getElementById('elevation-chart'));
  }
  var series = [];
  for (var i = 0; i < distance_list.length; i++) {
    series.push([distance_list[i], parcel['ELEV_' + distance_list[i]]]);
  }
  elevationChart.setOption({
    xAxis: { type: 'value', name: 'distance (ft)' },
    yAxis: { type: 'value', name: 'elevation (ft)' },
    series: [
      { type: 'line', data: series },
      { type: 'line', markLine: { data: [{ yAxis: MHHW_OFFSET, name: 'MHHW' }] } }
    ]
  });
  drawSlope(parcel);
}

function drawSlope(parcel) {
  if (slopeChart == null) {
    slopeChart = echarts.init(document.getElementById('slope-chart'));
  }
  var slopes = [];
  for (var i = 1; i < distance_list.length; i++) {
    var rise = parcel['ELEV_' + distance_list[i]] - parcel['ELEV_' + distance_list[i - 1]];
    var run = distance_list[i] - distance_list[i - 1];
    slopes.push([distance_list[i], rise / run]);
  }
  slopeChart.setOption({ series: [{ type: 'line', data: slopes }] });
}

function updateParcelTable(props) {
  var table = document.getElementById('parcel-table');
  table.innerHTML = '<tr><td>Parcel</td><td>' + props.PARCEL_ID + '</td></tr>' +
    '<tr><td>Owner class</td><td>' + props.OWN_CLASS + '</td></tr>' +
    '<tr><td>Shoreline distance</td><td>' + props.SHORE_DIST + ' ft</td></tr>';
}

function updateEjTable(geoid, demogidx, pctColor) {
  var table = document.getElementById('ej-table');
  table.innerHTML = '<tr><td>Tract</td><td>' + geoid + '</td></tr>' +
    '<tr><td>DEMOGIDX_2</td><td>' + demogidx + '</td></tr>' +
    '<tr><td>People of color</td><td>' + pctColor + '%</td></tr>';
}

// Slider state is observed through DOM mutation, not events.
function watchSliders() {
  var yearSlider = document.getElementById('year-slider');
  var levelSlider = document.getElementById('level-slider');
  var observer = new MutationObserver(function (mutations) {
    for (var i = 0; i < mutations.length; i++) {
      var target = mutations[i].target;
      if (target.id === 'year-slider') {
        currentYear = parseInt(target.getAttribute('data-value'), 10);
      }
      if (target.id === 'level-slider') {
        currentLevel = target.getAttribute('data-value');
      }
    }
    currentFeet = getFeet(currentYear, currentLevel);
    switchScenarioLayer();
    if (selectedParcel != null) {
      drawElevation(selectedParcel);
    }
  });
  observer.observe(yearSlider, { attributes: true });
  observer.observe(levelSlider, { attributes: true });

  var opacity = document.getElementById('sl-opac');
  opacity.onchange = function () {
    var wanted = layerIdFor(currentYear, currentLevel);
    map.setPaintProperty(wanted, 'fill-opacity', parseFloat(opacity.value));
  };
}

function doSearch() {
  var box = document.getElementById('search-box');
  var text = box.value;
  if (text.indexOf(',') > 0) {
    var parts = text.split(',');
    map.flyTo({ center: [parseFloat(parts[1]), parseFloat(parts[0])], zoom: 15 });
  } else if (text.match(/^[0-9]+$/)) {
    map.setFilter('parcel-highlighted', ['==', 'PARCEL_ID', text]);
  } else {
    geocodeAddress(text);
  }
}

function geocodeAddress(text) {
  var url = 'https://api.mapbox.com/geocoding/v5/mapbox.places/' +
    encodeURIComponent(text) + '.json?access_token=' + accessToken;
  fetch(url).then(function (resp) { return resp.json(); }).then(function (data) {
    if (data.features.length > 0) {
      map.flyTo({ center: data.features[0].center, zoom: 15 });
    }
  });
}

function downloadCsv() {
  if (selectedParcel == null) { return; }
  var rows = 'PARCEL_ID,OWN_CLASS,SHORE_DIST\n' +
    selectedParcel.PARCEL_ID + ',' + selectedParcel.OWN_CLASS + ',' + selectedParcel.SHORE_DIST;
  var blob = new Blob([rows], { type: 'text/csv' });
  var link = document.createElement('a');
  link.href = URL.createObjectURL(blob);
  link.download = 'parcel.csv';
  link.click();
}

window.onload = function () {
  initMap();
  watchSliders();
  document.getElementById('search-go').onclick = doSearch;
  document.getElementById('download-csv').onclick = downloadCsv;
  document.getElementById('toggle-ej').onchange = function (e) {
    map.setLayoutProperty('ej-polygons1', 'visibility', e.target.checked ? 'visible' : 'none');
  };
};
