int main() { int x = "a"; }
